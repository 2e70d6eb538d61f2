//! Discretized configuration and phase-space domains.
//!
//! Grids are uniform, periodic, centered on the origin and power-of-two
//! sized. The momentum axis dual to a position axis has spacing
//! `Δp = 2πħ/(M Δx)` and is centered at 0, so the ħ-scaled Fourier transform
//! maps a centered axis onto its dual and back (the dual of the dual is the
//! original axis).
//!
//! `ConfigField` supports any number of axes; the phase-space grid types are
//! one degree of freedom (a 2D `(x, p)` lattice), which is what every
//! grid-path operation downstream works with. Matrix-level operations place
//! no limit on N.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::fft::{is_power_of_two, Fft};
use crate::Result;

/// One uniform sampling axis: point `j` sits at `min + j*step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub len: usize,
    pub min: f64,
    pub step: f64,
}

impl Axis {
    /// Centered axis covering `[-extent, extent)`.
    pub fn centered(len: usize, extent: f64) -> Result<Axis> {
        if !is_power_of_two(len) {
            return Err(Error::NotPowerOfTwo(len));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidBounds);
        }
        let step = 2.0 * extent / len as f64;
        Ok(Axis { len, min: -extent, step })
    }

    pub fn point(&self, j: usize) -> f64 {
        self.min + j as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.point(j)).collect()
    }

    pub fn extent(&self) -> f64 {
        self.step * self.len as f64
    }

    /// The ħ-dual momentum axis: spacing `2πħ/(len·step)`, centered at 0.
    pub fn dual(&self, hbar: f64) -> Axis {
        let step = 2.0 * PI * hbar / (self.len as f64 * self.step);
        Axis { len: self.len, min: -(self.len as f64 / 2.0) * step, step }
    }

    pub fn approx_eq(&self, other: &Axis) -> bool {
        let scale = self.step.abs().max(other.step.abs());
        self.len == other.len
            && (self.step - other.step).abs() < 1e-9 * scale
            && (self.min - other.min).abs() < 1e-9 * scale * self.len as f64
    }

    /// Index of the sample nearest to `x` under periodic wrapping, together
    /// with the off-lattice remainder.
    pub fn wrap(&self, x: f64) -> (usize, f64) {
        let l = self.extent();
        let mut t = (x - self.min) / self.step;
        let n = self.len as f64;
        t -= (t / n).floor() * n;
        let j = t.round() as usize % self.len;
        let rem = (t - t.round()) * self.step;
        let _ = l;
        (j, rem)
    }
}

/// Configuration-space grid with one axis per degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigGrid {
    axes: Vec<Axis>,
    hbar: f64,
}

impl ConfigGrid {
    pub fn new_1d(len: usize, extent: f64, hbar: f64) -> Result<ConfigGrid> {
        ConfigGrid::new_nd(&[(len, extent)], hbar)
    }

    pub fn new_nd(spec: &[(usize, f64)], hbar: f64) -> Result<ConfigGrid> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::NonPositiveHbar);
        }
        let axes = spec
            .iter()
            .map(|&(len, ext)| Axis::centered(len, ext))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConfigGrid { axes, hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dof(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell volume `Π Δx_i`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step).product()
    }

    /// Grid with every axis replaced by its ħ-dual.
    pub fn dual(&self) -> ConfigGrid {
        ConfigGrid {
            axes: self.axes.iter().map(|a| a.dual(self.hbar)).collect(),
            hbar: self.hbar,
        }
    }

    pub fn approx_eq(&self, other: &ConfigGrid) -> bool {
        self.axes.len() == other.axes.len()
            && (self.hbar - other.hbar).abs() < 1e-12 * self.hbar.abs()
            && self.axes.iter().zip(&other.axes).all(|(a, b)| a.approx_eq(b))
    }

    /// Coordinates of the flattened index `idx`.
    pub fn coords(&self, mut idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (i, ax) in self.axes.iter().enumerate().rev() {
            out[i] = ax.point(idx % ax.len);
            idx /= ax.len;
        }
        out
    }
}

/// Complex field sampled on a `ConfigGrid`.
#[derive(Debug, Clone)]
pub struct ConfigField {
    grid: ConfigGrid,
    values: Vec<C64>,
}

/// Transform direction for [`hbar_fourier`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl ConfigField {
    pub fn zeros(grid: &ConfigGrid) -> ConfigField {
        ConfigField { grid: grid.clone(), values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: &ConfigGrid, mut f: impl FnMut(&[f64]) -> C64) -> ConfigField {
        let mut out = ConfigField::zeros(grid);
        let mut coords = vec![0.0; grid.dof()];
        for idx in 0..grid.len() {
            let c = grid.coords(idx);
            coords.copy_from_slice(&c);
            out.values[idx] = f(&coords);
        }
        out
    }

    pub fn from_values(grid: &ConfigGrid, values: Vec<C64>) -> Result<ConfigField> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(ConfigField { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &ConfigGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> ConfigField {
        ConfigField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> ConfigField {
        self.map(|v| v.conj())
    }

    pub fn scaled(&self, s: C64) -> ConfigField {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &ConfigField) -> Result<ConfigField> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(ConfigField {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &ConfigField) -> Result<ConfigField> {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    /// Pointwise product `self * other`.
    pub fn mul_pointwise(&self, other: &ConfigField) -> Result<ConfigField> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(ConfigField {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// Multiply by a real function of the coordinates.
    pub fn mul_coord(&self, f: impl Fn(&[f64]) -> f64) -> ConfigField {
        let mut out = self.clone();
        for idx in 0..out.values.len() {
            let c = out.grid.coords(idx);
            out.values[idx] *= f(&c);
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        let v = self.grid.cell_volume();
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * v
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Translation `ψ(x) ↦ ψ(x - a)`, one shift per axis. Whole-cell shifts
    /// are exact index rolls; off-lattice shifts are spectral.
    pub fn translate(&self, shift: &[f64]) -> Result<ConfigField> {
        if shift.len() != self.grid.dof() {
            return Err(Error::DimensionMismatch { expected: self.grid.dof(), got: shift.len() });
        }
        let dims: Vec<usize> = self.grid.axes().iter().map(|a| a.len).collect();
        let mut values = self.values.clone();
        for (axis, &a) in shift.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let m = dims[axis];
            let step = self.grid.axis(axis).step;
            let cells = a / step;
            let lattice = (cells - cells.round()).abs() < 1e-12 * (1.0 + cells.abs());
            let fft = Fft::new(m);
            let mut buf = vec![C64::new(0.0, 0.0); m];
            let mut lanes: Vec<(usize, usize)> = Vec::new();
            for_each_lane(&dims, axis, |base, stride| lanes.push((base, stride)));
            if lattice {
                let r = cells.round() as isize;
                for (base, stride) in &lanes {
                    gather(&values, *base, *stride, m, &mut buf);
                    let mut rolled = vec![C64::new(0.0, 0.0); m];
                    for (j, slot) in rolled.iter_mut().enumerate() {
                        let src = (j as isize - r).rem_euclid(m as isize) as usize;
                        *slot = buf[src];
                    }
                    scatter(&mut values, *base, *stride, m, &rolled);
                }
            } else {
                let mult: Vec<C64> = (0..m)
                    .map(|k| {
                        let ang = -wavenumber(k, m, step) * a;
                        C64::new(ang.cos(), ang.sin())
                    })
                    .collect();
                for (base, stride) in &lanes {
                    gather(&values, *base, *stride, m, &mut buf);
                    fft.forward(&mut buf);
                    for (v, w) in buf.iter_mut().zip(&mult) {
                        *v *= w;
                    }
                    fft.inverse(&mut buf);
                    scatter(&mut values, *base, *stride, m, &buf);
                }
            }
        }
        Ok(ConfigField { grid: self.grid.clone(), values })
    }
}

/// Riemann-sum inner product `(f, g) = Σ f ḡ ΔV`, conjugate-linear in the
/// second slot.
pub fn inner(f: &ConfigField, g: &ConfigField) -> Result<C64> {
    if !f.grid.approx_eq(&g.grid) {
        return Err(Error::GridMismatch);
    }
    let v = f.grid.cell_volume();
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum::<C64>() * v)
}

/// Visit every 1D lane of a flattened row-major array along `axis`,
/// passing (base offset, stride).
fn for_each_lane(dims: &[usize], axis: usize, mut f: impl FnMut(usize, usize)) {
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let block = stride * dims[axis];
    for o in 0..outer {
        for i in 0..stride {
            f(o * block + i, stride);
        }
    }
}

fn gather(values: &[C64], base: usize, stride: usize, len: usize, buf: &mut [C64]) {
    for (k, slot) in buf.iter_mut().enumerate().take(len) {
        *slot = values[base + k * stride];
    }
}

fn scatter(values: &mut [C64], base: usize, stride: usize, len: usize, buf: &[C64]) {
    for k in 0..len {
        values[base + k * stride] = buf[k];
    }
}

/// One-axis ħ-scaled Fourier kernel.
///
/// Forward: `out_k = (2πħ)^{-1/2} Δx Σ_j e^{-i p_k x_j/ħ} in_j` with `p` the
/// ħ-dual of `x`. Inverse: the conjugate sum with `Δp` weights, mapping data
/// on the dual axis back to `x`. `forward ∘ inverse` is the identity to
/// roundoff.
pub(crate) struct HbarAxisKernel {
    fft: Fft,
    pre: Vec<C64>,
    post: Vec<C64>,
    scale_f: f64,
    scale_i: f64,
    c0: C64,
}

impl HbarAxisKernel {
    pub(crate) fn new(x: &Axis, hbar: f64) -> HbarAxisKernel {
        let p = x.dual(hbar);
        let m = x.len;
        let mut pre = Vec::with_capacity(m);
        let mut post = Vec::with_capacity(m);
        for j in 0..m {
            let ang = -p.min * (j as f64 * x.step) / hbar;
            pre.push(C64::new(ang.cos(), ang.sin()));
        }
        for k in 0..m {
            let ang = -(k as f64 * p.step) * x.min / hbar;
            post.push(C64::new(ang.cos(), ang.sin()));
        }
        let ang0 = -p.min * x.min / hbar;
        HbarAxisKernel {
            fft: Fft::new(m),
            pre,
            post,
            scale_f: x.step / (2.0 * PI * hbar).sqrt(),
            scale_i: p.step / (2.0 * PI * hbar).sqrt(),
            c0: C64::new(ang0.cos(), ang0.sin()),
        }
    }

    pub(crate) fn apply(&self, buf: &mut [C64], dir: Direction) {
        let m = buf.len();
        match dir {
            Direction::Forward => {
                for (v, w) in buf.iter_mut().zip(&self.pre) {
                    *v *= w;
                }
                self.fft.forward(buf);
                let s = self.c0 * self.scale_f;
                for (v, w) in buf.iter_mut().zip(&self.post) {
                    *v *= s * w;
                }
            }
            Direction::Inverse => {
                for (v, w) in buf.iter_mut().zip(&self.post) {
                    *v *= w.conj();
                }
                self.fft.backward_unscaled(buf);
                let s = self.c0.conj() * self.scale_i;
                let _ = m;
                for (v, w) in buf.iter_mut().zip(&self.pre) {
                    *v *= s * w.conj();
                }
            }
        }
    }
}

pub(crate) fn hbar_axis_kernel(x: &Axis, hbar: f64) -> HbarAxisKernel {
    HbarAxisKernel::new(x, hbar)
}

/// ħ-scaled Fourier transform along every axis.
///
/// Forward maps a field on `grid` to its momentum representation on
/// `grid.dual()`; inverse maps back. Axes are centered, so the two are
/// mutually inverse.
pub fn hbar_fourier(field: &ConfigField, dir: Direction) -> ConfigField {
    let grid = field.grid();
    let hbar = grid.hbar();
    let out_grid = grid.dual();
    let dims: Vec<usize> = grid.axes().iter().map(|a| a.len).collect();
    let mut values = field.values.clone();
    for axis in 0..dims.len() {
        // the kernel is built on the position-side axis in either direction
        let pos_axis = match dir {
            Direction::Forward => grid.axis(axis).clone(),
            Direction::Inverse => out_grid.axis(axis).clone(),
        };
        let kernel = HbarAxisKernel::new(&pos_axis, hbar);
        let mut buf = vec![C64::new(0.0, 0.0); dims[axis]];
        let mut lanes: Vec<(usize, usize)> = Vec::new();
        for_each_lane(&dims, axis, |base, stride| lanes.push((base, stride)));
        for (base, stride) in lanes {
            gather(&values, base, stride, dims[axis], &mut buf);
            kernel.apply(&mut buf, dir);
            scatter(&mut values, base, stride, dims[axis], &buf);
        }
    }
    ConfigField { grid: out_grid, values }
}

/// Signed angular wavenumber of FFT bin `k` on an axis of length `m` and
/// spacing `step`; the Nyquist bin maps to `-π/step`.
fn wavenumber(k: usize, m: usize, step: f64) -> f64 {
    let kk = if k < m / 2 { k as isize } else { k as isize - m as isize };
    2.0 * PI * kk as f64 / (m as f64 * step)
}

fn derivative_lanes(values: &mut [C64], dims: &[usize], axis: usize, step: f64) {
    let m = dims[axis];
    let fft = Fft::new(m);
    let mult: Vec<C64> = (0..m)
        .map(|k| {
            if m % 2 == 0 && k == m / 2 {
                // drop the unmatched Nyquist mode
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, wavenumber(k, m, step))
            }
        })
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let mut lanes: Vec<(usize, usize)> = Vec::new();
    for_each_lane(dims, axis, |base, stride| lanes.push((base, stride)));
    for (base, stride) in lanes {
        gather(values, base, stride, m, &mut buf);
        fft.forward(&mut buf);
        for (v, w) in buf.iter_mut().zip(&mult) {
            *v *= w;
        }
        fft.inverse(&mut buf);
        scatter(values, base, stride, m, &buf);
    }
}

/// Spectral partial derivative of a configuration field along `axis`.
pub fn spectral_derivative(field: &ConfigField, axis: usize) -> Result<ConfigField> {
    let grid = field.grid();
    if axis >= grid.dof() {
        return Err(Error::DimensionMismatch { expected: grid.dof(), got: axis });
    }
    let dims: Vec<usize> = grid.axes().iter().map(|a| a.len).collect();
    let mut out = field.clone();
    derivative_lanes(&mut out.values, &dims, axis, grid.axis(axis).step);
    Ok(out)
}

// ---------------------------------------------------------------------------
// phase space (one degree of freedom)
// ---------------------------------------------------------------------------

/// 2D `(x, p)` phase-space grid. The momentum axis defaults to the ħ-dual of
/// the position axis, which every fast-transform path relies on; custom
/// momentum axes are accepted at construction but rejected by operations
/// that need self-duality.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub x: Axis,
    pub p: Axis,
    hbar: f64,
}

impl PhaseGrid {
    /// Standard grid: `m x m` points, `x ∈ [-extent, extent)`, dual `p` axis.
    pub fn standard(m: usize, extent: f64, hbar: f64) -> Result<PhaseGrid> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::NonPositiveHbar);
        }
        let x = Axis::centered(m, extent)?;
        let p = x.dual(hbar);
        Ok(PhaseGrid { x, p, hbar })
    }

    /// Phase grid over a 1D configuration grid and its dual momentum axis.
    pub fn from_config(grid: &ConfigGrid) -> Result<PhaseGrid> {
        if grid.dof() != 1 {
            return Err(Error::UnsupportedDimension { max_dof: 1, got: grid.dof() });
        }
        let x = grid.axis(0).clone();
        let p = x.dual(grid.hbar());
        Ok(PhaseGrid { x, p, hbar: grid.hbar() })
    }

    pub fn with_momentum_axis(mut self, p: Axis) -> PhaseGrid {
        self.p = p;
        self
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn len(&self) -> usize {
        self.x.len * self.p.len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell area `Δx Δp`.
    pub fn cell_volume(&self) -> f64 {
        self.x.step * self.p.step
    }

    pub fn is_self_dual(&self) -> bool {
        self.p.approx_eq(&self.x.dual(self.hbar))
    }

    pub fn approx_eq(&self, other: &PhaseGrid) -> bool {
        self.x.approx_eq(&other.x)
            && self.p.approx_eq(&other.p)
            && (self.hbar - other.hbar).abs() < 1e-12 * self.hbar
    }

    /// The 1D configuration grid sharing this x-axis.
    pub fn config_grid(&self) -> ConfigGrid {
        ConfigGrid { axes: vec![self.x.clone()], hbar: self.hbar }
    }
}

/// Complex field on a phase-space grid, row-major with x outermost:
/// `values[ix * p.len + ip]`.
#[derive(Debug, Clone)]
pub struct PhaseField {
    grid: PhaseGrid,
    values: Vec<C64>,
}

impl PhaseField {
    pub fn zeros(grid: &PhaseGrid) -> PhaseField {
        PhaseField { grid: grid.clone(), values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: &PhaseGrid, mut f: impl FnMut(f64, f64) -> C64) -> PhaseField {
        let mut out = PhaseField::zeros(grid);
        for ix in 0..grid.x.len {
            let x = grid.x.point(ix);
            for ip in 0..grid.p.len {
                out.values[ix * grid.p.len + ip] = f(x, grid.p.point(ip));
            }
        }
        out
    }

    pub fn from_values(grid: &PhaseGrid, values: Vec<C64>) -> Result<PhaseField> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(PhaseField { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, ix: usize, ip: usize) -> C64 {
        self.values[ix * self.grid.p.len + ip]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, ip: usize, v: C64) {
        self.values[ix * self.grid.p.len + ip] = v;
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> PhaseField {
        PhaseField { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn conj(&self) -> PhaseField {
        self.map(|v| v.conj())
    }

    pub fn scaled(&self, s: C64) -> PhaseField {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &PhaseField) -> Result<PhaseField> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(PhaseField {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &PhaseField) -> Result<PhaseField> {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    /// Multiply by a complex function of `(x, p)`.
    pub fn mul_fn(&self, mut f: impl FnMut(f64, f64) -> C64) -> PhaseField {
        let mut out = self.clone();
        for ix in 0..out.grid.x.len {
            let x = out.grid.x.point(ix);
            for ip in 0..out.grid.p.len {
                out.values[ix * out.grid.p.len + ip] *= f(x, out.grid.p.point(ip));
            }
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        let v = self.grid.cell_volume();
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * v
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Cyclic shift by whole grid cells: output(ix, ip) = input(ix-dx, ip-dp).
    pub fn roll(&self, dx: isize, dp: isize) -> PhaseField {
        let (mx, mp) = (self.grid.x.len as isize, self.grid.p.len as isize);
        let mut out = PhaseField::zeros(&self.grid);
        for ix in 0..mx {
            let sx = (ix - dx).rem_euclid(mx) as usize;
            for ip in 0..mp {
                let sp = (ip - dp).rem_euclid(mp) as usize;
                out.values[(ix as usize) * mp as usize + ip as usize] =
                    self.values[sx * mp as usize + sp];
            }
        }
        out
    }

    /// Spectral derivative along x (axis 0) or p (axis 1).
    pub fn spectral_derivative(&self, axis: usize) -> PhaseField {
        let dims = [self.grid.x.len, self.grid.p.len];
        let step = if axis == 0 { self.grid.x.step } else { self.grid.p.step };
        let mut out = self.clone();
        derivative_lanes(&mut out.values, &dims, axis, step);
        out
    }

    /// Translation `Ψ(z) ↦ Ψ(z - a)`. Whole-cell shifts are exact index
    /// rolls; off-lattice shifts are spectral (exact for band-limited data).
    pub fn translate(&self, ax: f64, ap: f64) -> PhaseField {
        let nx = ax / self.grid.x.step;
        let np = ap / self.grid.p.step;
        let lattice = (nx - nx.round()).abs() < 1e-12 * (1.0 + nx.abs())
            && (np - np.round()).abs() < 1e-12 * (1.0 + np.abs());
        if lattice {
            return self.roll(nx.round() as isize, np.round() as isize);
        }
        let dims = [self.grid.x.len, self.grid.p.len];
        let mut values = self.values.clone();
        for (axis, shift) in [(0usize, ax), (1usize, ap)] {
            if shift == 0.0 {
                continue;
            }
            let m = dims[axis];
            let step = if axis == 0 { self.grid.x.step } else { self.grid.p.step };
            let fft = Fft::new(m);
            let mult: Vec<C64> = (0..m)
                .map(|k| {
                    let ang = -wavenumber(k, m, step) * shift;
                    C64::new(ang.cos(), ang.sin())
                })
                .collect();
            let mut buf = vec![C64::new(0.0, 0.0); m];
            let mut lanes: Vec<(usize, usize)> = Vec::new();
            for_each_lane(&dims, axis, |base, stride| lanes.push((base, stride)));
            for (base, stride) in lanes {
                gather(&values, base, stride, m, &mut buf);
                fft.forward(&mut buf);
                for (v, w) in buf.iter_mut().zip(&mult) {
                    *v *= w;
                }
                fft.inverse(&mut buf);
                scatter(&mut values, base, stride, m, &buf);
            }
        }
        PhaseField { grid: self.grid.clone(), values }
    }

    /// Evaluate the trigonometric interpolant at arbitrary points.
    /// Exact (to roundoff) on band-limited periodic data; Nyquist bins are
    /// split symmetrically so real fields stay real.
    pub fn eval_trig(&self, points: &[(f64, f64)]) -> Vec<C64> {
        let (mx, mp) = (self.grid.x.len, self.grid.p.len);
        // forward 2D DFT
        let mut spec = self.values.clone();
        let dims = [mx, mp];
        for axis in 0..2 {
            let m = dims[axis];
            let fft = Fft::new(m);
            let mut buf = vec![C64::new(0.0, 0.0); m];
            let mut lanes: Vec<(usize, usize)> = Vec::new();
            for_each_lane(&dims, axis, |base, stride| lanes.push((base, stride)));
            for (base, stride) in lanes {
                gather(&spec, base, stride, m, &mut buf);
                fft.forward(&mut buf);
                scatter(&mut spec, base, stride, m, &buf);
            }
        }
        let norm = 1.0 / (mx * mp) as f64;
        let phase_vec = |m: usize, step: f64, min: f64, t: f64| -> Vec<C64> {
            (0..m)
                .map(|k| {
                    if m % 2 == 0 && k == m / 2 {
                        // split Nyquist: cos(π (t-min)/step)
                        let ang = PI * (t - min) / step;
                        C64::new(ang.cos(), 0.0)
                    } else {
                        let ang = wavenumber(k, m, step) * (t - min);
                        C64::new(ang.cos(), ang.sin())
                    }
                })
                .collect()
        };
        points
            .iter()
            .map(|&(x, p)| {
                let vx = phase_vec(mx, self.grid.x.step, self.grid.x.min, x);
                let vp = phase_vec(mp, self.grid.p.step, self.grid.p.min, p);
                let mut acc = C64::new(0.0, 0.0);
                for kx in 0..mx {
                    let mut row = C64::new(0.0, 0.0);
                    let base = kx * mp;
                    for kp in 0..mp {
                        row += spec[base + kp] * vp[kp];
                    }
                    acc += vx[kx] * row;
                }
                acc * norm
            })
            .collect()
    }
}

/// Phase-space inner product `((F, G)) = Σ F Ḡ Δx Δp`.
pub fn inner_phase(f: &PhaseField, g: &PhaseField) -> Result<C64> {
    if !f.grid.approx_eq(&g.grid) {
        return Err(Error::GridMismatch);
    }
    let v = f.grid.cell_volume();
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum::<C64>() * v)
}

/// ħ-transform of one axis of a phase field.
///
/// `axis` 0 transforms x-lanes, 1 transforms p-lanes. Forward uses the
/// kernel `e^{-i(dual·var)/ħ}`, inverse the conjugate. The grid must be
/// self-dual so the result lives on the same lattice.
pub(crate) fn phase_axis_transform(
    field: &PhaseField,
    axis: usize,
    dir: Direction,
) -> Result<PhaseField> {
    if !field.grid.is_self_dual() {
        return Err(Error::GridMismatch);
    }
    let dims = [field.grid.x.len, field.grid.p.len];
    // position-side axis of the transform pair
    let pos_axis = match (axis, dir) {
        (0, Direction::Forward) => field.grid.x.clone(),
        (0, Direction::Inverse) => field.grid.p.clone(),
        (1, Direction::Forward) => field.grid.p.clone(),
        (1, Direction::Inverse) => field.grid.x.clone(),
        _ => unreachable!(),
    };
    let kernel = HbarAxisKernel::new(&pos_axis, field.grid.hbar);
    let mut values = field.values.clone();
    let m = dims[axis];
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let mut lanes: Vec<(usize, usize)> = Vec::new();
    for_each_lane(&dims, axis, |base, stride| lanes.push((base, stride)));
    for (base, stride) in lanes {
        gather(&values, base, stride, m, &mut buf);
        kernel.apply(&mut buf, dir);
        scatter(&mut values, base, stride, m, &buf);
    }
    Ok(PhaseField { grid: field.grid.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_field(grid: &ConfigGrid) -> ConfigField {
        let h = grid.hbar();
        ConfigField::from_fn(grid, |x| {
            C64::new((PI * h).powf(-0.25) * (-x[0] * x[0] / (2.0 * h)).exp(), 0.0)
        })
    }

    #[test]
    fn standard_gaussian_is_fourier_self_reciprocal() {
        let grid = ConfigGrid::new_1d(256, 12.0, 1.0).unwrap();
        let phi = gaussian_field(&grid);
        let f = hbar_fourier(&phi, Direction::Forward);
        // dual grid of a centered grid coincides with a centered momentum grid
        let mut err = 0.0f64;
        for (idx, v) in f.values().iter().enumerate() {
            let p = f.grid().coords(idx)[0];
            let want = (PI * 1.0).powf(-0.25) * (-p * p / 2.0).exp();
            err = err.max((v - C64::new(want, 0.0)).norm());
        }
        assert!(err < 1e-12, "max err {err:.3e}");
    }

    #[test]
    fn fourier_roundtrip_and_unitarity() {
        let grid = ConfigGrid::new_1d(128, 10.0, 0.5).unwrap();
        let f = ConfigField::from_fn(&grid, |x| {
            C64::new((-x[0] * x[0]).exp() * (1.3 * x[0]).cos(), (0.7 * x[0]).sin() * (-x[0] * x[0] / 2.0).exp())
        });
        let ft = hbar_fourier(&f, Direction::Forward);
        let back = hbar_fourier(&ft, Direction::Inverse);
        let mut err = 0.0f64;
        for (a, b) in back.values().iter().zip(f.values()) {
            err = err.max((a - b).norm());
        }
        assert!(err < 1e-12, "roundtrip err {err:.3e}");
        assert!((ft.norm() - f.norm()).abs() < 1e-12);
    }

    #[test]
    fn shifted_gaussian_picks_up_linear_phase() {
        let hbar = 1.0;
        let grid = ConfigGrid::new_1d(256, 14.0, hbar).unwrap();
        let a = 1.0;
        let shifted = ConfigField::from_fn(&grid, |x| {
            C64::new((PI * hbar).powf(-0.25) * (-(x[0] - a) * (x[0] - a) / (2.0 * hbar)).exp(), 0.0)
        });
        let ft = hbar_fourier(&shifted, Direction::Forward);
        let mut err = 0.0f64;
        for (idx, v) in ft.values().iter().enumerate() {
            let p = ft.grid().coords(idx)[0];
            let mag = (PI * hbar).powf(-0.25) * (-p * p / (2.0 * hbar)).exp();
            let want = C64::new(0.0, -p * a / hbar).exp() * mag;
            err = err.max((v - want).norm());
        }
        assert!(err < 1e-10, "shift theorem err {err:.3e}");
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let grid = ConfigGrid::new_1d(256, 10.0, 1.0).unwrap();
        let f = ConfigField::from_fn(&grid, |x| C64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        let d = spectral_derivative(&f, 0).unwrap();
        let mut err = 0.0f64;
        for (idx, v) in d.values().iter().enumerate() {
            let x = grid.coords(idx)[0];
            let want = -x * (-x * x / 2.0).exp();
            err = err.max((v - C64::new(want, 0.0)).norm());
        }
        assert!(err < 1e-10, "derivative err {err:.3e}");
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let grid = ConfigGrid::new_1d(64, 5.0, 1.0).unwrap();
        let f = ConfigField::from_fn(&grid, |_| C64::new(1.0, 0.5));
        let d = spectral_derivative(&f, 0).unwrap();
        assert!(d.max_abs() < 1e-13);
    }

    #[test]
    fn phase_field_p_derivative_of_p_constant_vanishes() {
        let grid = PhaseGrid::standard(64, 8.0, 1.0).unwrap();
        let f = PhaseField::from_fn(&grid, |x, _| C64::new((-x * x).exp(), 0.0));
        let d = f.spectral_derivative(1);
        assert!(d.max_abs() < 1e-13);
    }

    #[test]
    fn inner_product_normalization() {
        let grid = ConfigGrid::new_1d(256, 12.0, 1.0).unwrap();
        let phi = gaussian_field(&grid);
        let n = inner(&phi, &phi).unwrap();
        assert!((n.re - 1.0).abs() < 1e-12);
        assert!(n.im.abs() < 1e-15);
    }

    #[test]
    fn inner_rejects_grid_mismatch() {
        let g1 = ConfigGrid::new_1d(64, 5.0, 1.0).unwrap();
        let g2 = ConfigGrid::new_1d(64, 6.0, 1.0).unwrap();
        let a = gaussian_field(&g1);
        let b = gaussian_field(&g2);
        assert!(matches!(inner(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn grid_rejects_non_power_of_two() {
        assert!(matches!(
            ConfigGrid::new_1d(100, 5.0, 1.0),
            Err(Error::NotPowerOfTwo(100))
        ));
    }

    #[test]
    fn translate_matches_roll_on_lattice() {
        let grid = PhaseGrid::standard(32, 6.0, 1.0).unwrap();
        let f = PhaseField::from_fn(&grid, |x, p| C64::new((-x * x - p * p).exp(), x * p * 0.1));
        let a = f.roll(3, -2);
        let b = f.translate(3.0 * grid.x.step, -2.0 * grid.p.step);
        let mut err = 0.0f64;
        for (u, v) in a.values().iter().zip(b.values()) {
            err = err.max((u - v).norm());
        }
        assert!(err < 1e-12);
    }

    #[test]
    fn spectral_translate_matches_analytic_shift() {
        let grid = PhaseGrid::standard(64, 10.0, 1.0).unwrap();
        let f = PhaseField::from_fn(&grid, |x, p| C64::new((-(x * x + p * p) / 2.0).exp(), 0.0));
        let (ax, ap) = (0.31, -0.77);
        let g = f.translate(ax, ap);
        let mut err = 0.0f64;
        for ix in 0..grid.x.len {
            for ip in 0..grid.p.len {
                let (x, p) = (grid.x.point(ix), grid.p.point(ip));
                let want = (-((x - ax).powi(2) + (p - ap).powi(2)) / 2.0).exp();
                err = err.max((g.get(ix, ip) - C64::new(want, 0.0)).norm());
            }
        }
        assert!(err < 1e-9, "spectral shift err {err:.3e}");
    }

    #[test]
    fn trig_eval_reproduces_samples_and_midpoints() {
        let grid = PhaseGrid::standard(64, 9.0, 1.0).unwrap();
        let f = PhaseField::from_fn(&grid, |x, p| {
            C64::new((-(x * x + p * p) / 2.0).exp(), 0.3 * (-(x * x + p * p) / 3.0).exp())
        });
        let pts = [
            (grid.x.point(20), grid.p.point(31)),
            (grid.x.point(20) + 0.5 * grid.x.step, grid.p.point(31) + 0.5 * grid.p.step),
        ];
        let vals = f.eval_trig(&pts);
        assert!((vals[0] - f.get(20, 31)).norm() < 1e-12);
        let (x, p) = pts[1];
        let want = C64::new((-(x * x + p * p) / 2.0).exp(), 0.3 * (-(x * x + p * p) / 3.0).exp());
        assert!((vals[1] - want).norm() < 1e-9);
    }
}
