//! Heisenberg-Weyl operators and Weyl quantization, on configuration space
//! and on phase space.
//!
//! Configuration side: the usual rules `x ↦ x`, `p ↦ -iħ∂_x` for polynomial
//! symbols, or the superposition `Â = (2πħ)^{-N} ∫ (F_σA)(z₀) T(z₀) d²z₀`
//! for Schwartz-class grid symbols.
//!
//! Phase side: the quantization rules become `x ↦ x/2 + iħ∂_p`,
//! `p ↦ p/2 - iħ∂_x` (with `[X̂, P̂] = +iħ`), realized either as a spectral
//! stencil for polynomial symbols or, for grid symbols on small grids, as
//! the dense kernel `K(z, z') = (2πħ)^{-N} e^{i z∧z'/2ħ} (F_σA)(z - z')`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::grid::{ConfigField, PhaseField, PhaseGrid};
use crate::linalg::Mat;
use crate::transforms::symplectic_fourier;
use crate::Result;

/// Grid-point cap for dense kernels (32 x 32 phase grids). The dense path
/// is an oracle, not a production path.
pub const DENSE_CAP: usize = 1024;

/// Aliasing guard: a grid symbol is rejected when more than this fraction
/// of the L¹ mass of its twisted Fourier transform sits in the outer 10%
/// of the grid.
pub const OUTER_MASS_TOL: f64 = 1e-6;

fn unit_phase(ang: f64) -> C64 {
    C64::new(ang.cos(), ang.sin())
}

/// Heisenberg-Weyl operator on configuration space,
/// `T(z₀, t₀)ψ(x) = e^{i t₀/ħ} e^{(i/ħ)(p₀·x - ½ p₀·x₀)} ψ(x - x₀)`.
///
/// The `e^{+i t₀/ħ}` convention makes the group law
/// `T(z₀,t₀) T(z₁,t₁) = T(z₀+z₁, t₀+t₁+½ z₀∧z₁)` hold exactly on both
/// representations. Lattice shifts are exact rolls, off-lattice shifts
/// spectral.
pub fn hw_config(z0: &[f64], t0: f64, psi: &ConfigField) -> Result<ConfigField> {
    let n = psi.grid().dof();
    if z0.len() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: z0.len() });
    }
    let hbar = psi.grid().hbar();
    let (x0, p0) = z0.split_at(n);
    let shifted = psi.translate(x0)?;
    let half: f64 = p0.iter().zip(x0).map(|(p, x)| p * x).sum();
    let global = unit_phase(t0 / hbar - 0.5 * half / hbar);
    let mut out = shifted;
    for idx in 0..out.values().len() {
        let xs = out.grid().coords(idx);
        let px: f64 = p0.iter().zip(&xs).map(|(p, x)| p * x).sum();
        out.values_mut()[idx] *= global * unit_phase(px / hbar);
    }
    Ok(out)
}

/// Heisenberg-Weyl operator on phase space,
/// `T_ph(z₀, t₀)Ψ(z) = e^{i t₀/ħ} e^{-(i/2ħ) z∧z₀} Ψ(z - z₀)`.
pub fn hw_phase(z0: [f64; 2], t0: f64, field: &PhaseField) -> PhaseField {
    let hbar = field.grid().hbar();
    let (x0, p0) = (z0[0], z0[1]);
    let shifted = field.translate(x0, p0);
    let global = unit_phase(t0 / hbar);
    shifted.mul_fn(|x, p| global * unit_phase(-0.5 * (p * x0 - p0 * x) / hbar))
}

/// Polynomial symbol of total degree ≤ 2 in `(x, p)`, one degree of
/// freedom: `A = c0 + cx x + cp p + cxx x² + cxp xp + cpp p²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PolySymbol {
    pub c0: f64,
    pub cx: f64,
    pub cp: f64,
    pub cxx: f64,
    pub cxp: f64,
    pub cpp: f64,
}

impl PolySymbol {
    /// Harmonic oscillator in normal form, `H = (ω/2)(x² + p²)`.
    pub fn harmonic(omega: f64) -> PolySymbol {
        PolySymbol { cxx: omega / 2.0, cpp: omega / 2.0, ..PolySymbol::default() }
    }

    pub fn position() -> PolySymbol {
        PolySymbol { cx: 1.0, ..PolySymbol::default() }
    }

    pub fn momentum() -> PolySymbol {
        PolySymbol { cp: 1.0, ..PolySymbol::default() }
    }

    pub fn eval(&self, x: f64, p: f64) -> f64 {
        self.c0 + self.cx * x + self.cp * p + self.cxx * x * x + self.cxp * x * p + self.cpp * p * p
    }

    /// Pullback `A ∘ S` under a linear map (2 x 2 matrix).
    pub fn compose_linear(&self, s: &Mat) -> PolySymbol {
        let (a, b) = (s[(0, 0)], s[(0, 1)]);
        let (c, d) = (s[(1, 0)], s[(1, 1)]);
        PolySymbol {
            c0: self.c0,
            cx: self.cx * a + self.cp * c,
            cp: self.cx * b + self.cp * d,
            cxx: self.cxx * a * a + self.cxp * a * c + self.cpp * c * c,
            cxp: 2.0 * self.cxx * a * b + self.cxp * (a * d + b * c) + 2.0 * self.cpp * c * d,
            cpp: self.cxx * b * b + self.cxp * b * d + self.cpp * d * d,
        }
    }

    pub fn is_real_zero(&self) -> bool {
        self.c0 == 0.0
            && self.cx == 0.0
            && self.cp == 0.0
            && self.cxx == 0.0
            && self.cxp == 0.0
            && self.cpp == 0.0
    }
}

/// A Weyl symbol: exact polynomial coefficients or samples on a phase grid.
#[derive(Debug, Clone)]
pub enum WeylSymbol {
    Poly(PolySymbol),
    Grid(PhaseField),
}

// configuration-side first-order operators
fn op_x_config(psi: &ConfigField) -> ConfigField {
    psi.mul_coord(|c| c[0])
}

fn op_p_config(psi: &ConfigField) -> Result<ConfigField> {
    let hbar = psi.grid().hbar();
    Ok(crate::grid::spectral_derivative(psi, 0)?.scaled(C64::new(0.0, -hbar)))
}

/// Weyl quantization applied on configuration space.
///
/// Polynomial symbols use the exact rules with symmetric ordering
/// (`xp ↦ (x̂p̂ + p̂x̂)/2`). Grid symbols are applied through the
/// Heisenberg-Weyl superposition with the twisted Fourier transform of the
/// symbol as weight; the symbol grid must pair the state's axis with its
/// dual, and its twisted spectrum must pass the aliasing guard.
pub fn weyl_quantize_config(symbol: &WeylSymbol, psi: &ConfigField) -> Result<ConfigField> {
    match symbol {
        WeylSymbol::Poly(s) => {
            if psi.grid().dof() != 1 {
                return Err(Error::UnsupportedDimension { max_dof: 1, got: psi.grid().dof() });
            }
            let mut out = psi.scaled(C64::new(s.c0, 0.0));
            if s.cx != 0.0 {
                out = out.add(&op_x_config(psi).scaled(C64::new(s.cx, 0.0)))?;
            }
            if s.cp != 0.0 {
                out = out.add(&op_p_config(psi)?.scaled(C64::new(s.cp, 0.0)))?;
            }
            if s.cxx != 0.0 {
                out = out.add(&op_x_config(&op_x_config(psi)).scaled(C64::new(s.cxx, 0.0)))?;
            }
            if s.cpp != 0.0 {
                out = out.add(&op_p_config(&op_p_config(psi)?)?.scaled(C64::new(s.cpp, 0.0)))?;
            }
            if s.cxp != 0.0 {
                let sym = op_x_config(&op_p_config(psi)?)
                    .add(&op_p_config(&op_x_config(psi))?)?
                    .scaled(C64::new(0.5 * s.cxp, 0.0));
                out = out.add(&sym)?;
            }
            Ok(out)
        }
        WeylSymbol::Grid(a) => {
            let grid = a.grid().clone();
            if !grid.config_grid().approx_eq(psi.grid()) {
                return Err(Error::GridMismatch);
            }
            let fa = symplectic_fourier(a)?;
            check_outer_mass(&fa)?;
            let m = grid.x.len;
            let hbar = grid.hbar();
            let vol = grid.cell_volume();
            let pref = vol / (2.0 * PI * hbar);
            // phase tables e^{i p_b x_m / ħ} and e^{-i p_b x_a / 2ħ}
            let mut full = vec![C64::new(0.0, 0.0); m * m];
            let mut half = vec![C64::new(0.0, 0.0); m * m];
            for b in 0..m {
                let p = grid.p.point(b);
                for j in 0..m {
                    let x = grid.x.point(j);
                    full[b * m + j] = unit_phase(p * x / hbar);
                    half[b * m + j] = unit_phase(-0.5 * p * x / hbar);
                }
            }
            let mut out = vec![C64::new(0.0, 0.0); m];
            for a_idx in 0..m {
                // x₀ = x.min + a·Δx sits (a - M/2) cells from the origin
                let roll = a_idx as isize - (m / 2) as isize;
                for b in 0..m {
                    let w = fa.get(a_idx, b) * pref * half[b * m + a_idx];
                    if w.norm_sqr() < 1e-60 {
                        continue;
                    }
                    for out_idx in 0..m {
                        let src = (out_idx as isize - roll).rem_euclid(m as isize) as usize;
                        out[out_idx] += w * full[b * m + out_idx] * psi.values()[src];
                    }
                }
            }
            ConfigField::from_values(psi.grid(), out)
        }
    }
}

fn check_outer_mass(fa: &PhaseField) -> Result<()> {
    let grid = fa.grid();
    let (mx, mp) = (grid.x.len, grid.p.len);
    let mut total = 0.0f64;
    let mut outer = 0.0f64;
    for ix in 0..mx {
        let x = grid.x.point(ix);
        for ip in 0..mp {
            let p = grid.p.point(ip);
            let v = fa.get(ix, ip).norm();
            total += v;
            if x.abs() > 0.45 * grid.x.extent() || p.abs() > 0.45 * grid.p.extent() {
                outer += v;
            }
        }
    }
    if total <= 0.0 {
        return Ok(());
    }
    let frac = outer / total;
    if frac > OUTER_MASS_TOL {
        return Err(Error::SymbolNotIntegrable(frac));
    }
    Ok(())
}

enum PhaseOpImpl {
    Stencil(PolySymbol),
    Dense { grid: PhaseGrid, kernel: Vec<C64> },
}

/// A linear operator on phase fields, either a spectral
/// differential-multiplicative stencil (polynomial symbols) or a dense
/// kernel matrix (grid symbols on small grids).
pub struct PhaseOperator {
    imp: PhaseOpImpl,
    hermitian: bool,
}

// phase-side first-order operators
pub(crate) fn op_x_phase(f: &PhaseField) -> PhaseField {
    let hbar = f.grid().hbar();
    f.mul_fn(|x, _| C64::new(0.5 * x, 0.0))
        .add(&f.spectral_derivative(1).scaled(C64::new(0.0, hbar)))
        .expect("same grid")
}

pub(crate) fn op_p_phase(f: &PhaseField) -> PhaseField {
    let hbar = f.grid().hbar();
    f.mul_fn(|_, p| C64::new(0.5 * p, 0.0))
        .add(&f.spectral_derivative(0).scaled(C64::new(0.0, -hbar)))
        .expect("same grid")
}

impl PhaseOperator {
    pub fn apply(&self, field: &PhaseField) -> Result<PhaseField> {
        match &self.imp {
            PhaseOpImpl::Stencil(s) => {
                let mut out = field.scaled(C64::new(s.c0, 0.0));
                if s.cx != 0.0 {
                    out = out.add(&op_x_phase(field).scaled(C64::new(s.cx, 0.0)))?;
                }
                if s.cp != 0.0 {
                    out = out.add(&op_p_phase(field).scaled(C64::new(s.cp, 0.0)))?;
                }
                if s.cxx != 0.0 {
                    out = out.add(&op_x_phase(&op_x_phase(field)).scaled(C64::new(s.cxx, 0.0)))?;
                }
                if s.cpp != 0.0 {
                    out = out.add(&op_p_phase(&op_p_phase(field)).scaled(C64::new(s.cpp, 0.0)))?;
                }
                if s.cxp != 0.0 {
                    let sym = op_x_phase(&op_p_phase(field))
                        .add(&op_p_phase(&op_x_phase(field)))?
                        .scaled(C64::new(0.5 * s.cxp, 0.0));
                    out = out.add(&sym)?;
                }
                Ok(out)
            }
            PhaseOpImpl::Dense { grid, kernel } => {
                if !field.grid().approx_eq(grid) {
                    return Err(Error::GridMismatch);
                }
                let n = grid.len();
                let vol = grid.cell_volume();
                let mut out = vec![C64::new(0.0, 0.0); n];
                for (i, slot) in out.iter_mut().enumerate() {
                    let row = &kernel[i * n..(i + 1) * n];
                    let mut acc = C64::new(0.0, 0.0);
                    for (k, v) in row.iter().zip(field.values()) {
                        acc += k * v;
                    }
                    *slot = acc * vol;
                }
                PhaseField::from_values(grid, out)
            }
        }
    }

    /// Whether the symbol was real (so the operator is Hermitian).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Dense matrix of the operator on the given grid (column-by-column
    /// application for stencils). Refused above [`DENSE_CAP`] points.
    pub fn to_dense_matrix(&self, grid: &PhaseGrid) -> Result<Vec<C64>> {
        let n = grid.len();
        if n > DENSE_CAP {
            return Err(Error::DenseGridTooLarge { len: n, cap: DENSE_CAP });
        }
        match &self.imp {
            PhaseOpImpl::Dense { grid: g, kernel } => {
                if !g.approx_eq(grid) {
                    return Err(Error::GridMismatch);
                }
                // fold the quadrature weight into the matrix
                let vol = g.cell_volume();
                Ok(kernel.iter().map(|k| k * vol).collect())
            }
            PhaseOpImpl::Stencil(_) => {
                let mut mat = vec![C64::new(0.0, 0.0); n * n];
                let mut basis = PhaseField::zeros(grid);
                for j in 0..n {
                    basis.values_mut()[j] = C64::new(1.0, 0.0);
                    if j > 0 {
                        basis.values_mut()[j - 1] = C64::new(0.0, 0.0);
                    }
                    let col = self.apply(&basis)?;
                    for i in 0..n {
                        mat[i * n + j] = col.values()[i];
                    }
                }
                Ok(mat)
            }
        }
    }

    /// Kernel value `K(z, z')` for dense operators.
    pub fn dense_kernel(&self) -> Option<(&PhaseGrid, &[C64])> {
        match &self.imp {
            PhaseOpImpl::Dense { grid, kernel } => Some((grid, kernel)),
            PhaseOpImpl::Stencil(_) => None,
        }
    }
}

/// Build the phase-space Weyl operator of a symbol.
///
/// Polynomial symbols become spectral stencils via the phase-space rules
/// with symmetric ordering. Grid symbols become dense kernels
/// `K(z, z') = (2πħ)^{-N} e^{i z∧z'/2ħ} (F_σA)(z - z')` (grids of at most
/// [`DENSE_CAP`] points; the kernel is Hermitian by construction exactly
/// when the symbol is real).
pub fn weyl_quantize_phase(symbol: &WeylSymbol, grid: &PhaseGrid) -> Result<PhaseOperator> {
    match symbol {
        WeylSymbol::Poly(s) => Ok(PhaseOperator { imp: PhaseOpImpl::Stencil(*s), hermitian: true }),
        WeylSymbol::Grid(a) => {
            if !a.grid().approx_eq(grid) {
                return Err(Error::GridMismatch);
            }
            let n = grid.len();
            if n > DENSE_CAP {
                return Err(Error::DenseGridTooLarge { len: n, cap: DENSE_CAP });
            }
            let fa = symplectic_fourier(a)?;
            check_outer_mass(&fa)?;
            let (mx, mp) = (grid.x.len, grid.p.len);
            let hbar = grid.hbar();
            let pref = 1.0 / (2.0 * PI * hbar);
            let imag_real = a.values().iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
            let mut kernel = vec![C64::new(0.0, 0.0); n * n];
            for ix in 0..mx {
                let x = grid.x.point(ix);
                for ip in 0..mp {
                    let p = grid.p.point(ip);
                    let row = ix * mp + ip;
                    for jx in 0..mx {
                        let xp = grid.x.point(jx);
                        // grid index of the difference coordinate (ix-jx)·Δx;
                        // the origin sits at index M/2 on centered axes
                        let dxi = (mx as isize / 2 + ix as isize - jx as isize)
                            .rem_euclid(mx as isize) as usize;
                        for jp in 0..mp {
                            let pp = grid.p.point(jp);
                            let dpi = (mp as isize / 2 + ip as isize - jp as isize)
                                .rem_euclid(mp as isize) as usize;
                            // z ∧ z' = p x' - p' x
                            let tw = unit_phase(0.5 * (p * xp - pp * x) / hbar);
                            kernel[row * n + jx * mp + jp] = fa.get(dxi, dpi) * tw * pref;
                        }
                    }
                }
            }
            Ok(PhaseOperator {
                imp: PhaseOpImpl::Dense { grid: grid.clone(), kernel },
                hermitian: imag_real < 1e-14,
            })
        }
    }
}

/// Phase-space harmonic oscillator operator,
/// `Ĥ_ph = -(ħ²ω/2)∇_z² - i(ħω/2)(p∂_x - x∂_p) + (ω/8)|z|²`,
/// as a spectral stencil.
pub fn ho_operator(omega: f64) -> PhaseOperator {
    PhaseOperator { imp: PhaseOpImpl::Stencil(PolySymbol::harmonic(omega)), hermitian: true }
}
