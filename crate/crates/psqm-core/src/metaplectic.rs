//! Metaplectic operators on configuration space and on phase space.
//!
//! A free symplectic matrix (det B ≠ 0) acts through its quadratic Fourier
//! transform
//!
//! ```text
//! Ŝ_{W,m}ψ(x) = (2πiħ)^{-N/2} i^m |det B|^{-1/2} ∫ e^{i W(x,x')/ħ} ψ(x') dx'
//! ```
//!
//! with `W` the generating function of `S`. When `det(S - I) ≠ 0` the same
//! operator is a weighted superposition of Heisenberg-Weyl operators,
//!
//! ```text
//! Ŝ = (2πiħ)^{-N} i^ν |det(S-I)|^{-1/2} ∫ e^{(i/2ħ) M_S z₀·z₀} T(z₀) d²z₀
//! ```
//!
//! where `M_S` is the symplectic Cayley transform and `ν = m - Inert W_xx`
//! for free matrices. Replacing `T_Sch` by `T_ph` gives the phase-space
//! metaplectic operators; both use the grid lattice as quadrature domain.
//! The `(2πiħ)^{-N}` normalization is the one under which the quadratic
//! Fourier and superposition forms of the same matrix agree numerically,
//! including their branch indices.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::grid::{ConfigField, Direction, PhaseField, PhaseGrid};
use crate::linalg::Mat;
use crate::symplectic::{
    free_decomposition, symplectic_cayley, FreeDecomposition, SymplecticMatrix,
};
use crate::weyl::{weyl_quantize_phase, PolySymbol, WeylSymbol};
use crate::Result;

/// A symplectic matrix together with the branch data fixing its metaplectic
/// lift: the free-type generating function and Maslov integer `m` (when
/// `det B ≠ 0`), the Cayley transform (when `det(S-I) ≠ 0`), and the
/// superposition branch integer `ν`, derived as `m - Inert W_xx` for free
/// matrices or supplied by the caller otherwise.
#[derive(Debug, Clone)]
pub struct MetaplecticData {
    s: SymplecticMatrix,
    free: Option<FreeDecomposition>,
    cayley: Option<Mat>,
    nu: Option<i32>,
}

impl MetaplecticData {
    /// Analyze `S`, optionally overriding the default Maslov branch.
    pub fn new(s: SymplecticMatrix, maslov: Option<i32>) -> MetaplecticData {
        let free = free_decomposition(&s, maslov).ok();
        let cayley = symplectic_cayley(&s).ok();
        let nu = free.as_ref().map(|f| (f.maslov - f.inert_wxx()).rem_euclid(4));
        MetaplecticData { s, free, cayley, nu }
    }

    /// Caller-declared superposition branch for non-free matrices.
    pub fn with_nu(mut self, nu: i32) -> MetaplecticData {
        self.nu = Some(nu.rem_euclid(4));
        self
    }

    pub fn matrix(&self) -> &SymplecticMatrix {
        &self.s
    }

    pub fn free(&self) -> Option<&FreeDecomposition> {
        self.free.as_ref()
    }

    pub fn cayley(&self) -> Option<&Mat> {
        self.cayley.as_ref()
    }

    pub fn nu(&self) -> Option<i32> {
        self.nu
    }

    pub fn maslov(&self) -> Option<i32> {
        self.free.as_ref().map(|f| f.maslov)
    }
}

fn unit_phase(ang: f64) -> C64 {
    C64::new(ang.cos(), ang.sin())
}

/// `i^k` for signed `k`.
fn i_pow(k: i32) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Quadratic Fourier transform of a free symplectic matrix (one degree of
/// freedom): dense quadrature of the generating-function kernel.
pub fn quadratic_fourier(data: &MetaplecticData, psi: &ConfigField) -> Result<ConfigField> {
    let free = data.free.as_ref().ok_or(Error::NotFree(0.0))?;
    quadratic_fourier_from(free, psi)
}

/// Same quadrature from explicit generating-function data (used for the
/// inverse operator, whose data is `W*(x,x') = -W(x',x)`, `m* = N - m`).
pub fn quadratic_fourier_from(free: &FreeDecomposition, psi: &ConfigField) -> Result<ConfigField> {
    if psi.grid().dof() != 1 {
        return Err(Error::UnsupportedDimension { max_dof: 1, got: psi.grid().dof() });
    }
    let grid = psi.grid().clone();
    let axis = grid.axis(0).clone();
    let hbar = grid.hbar();
    let m = axis.len;
    // (2πiħ)^{-1/2} = (2πħ)^{-1/2} e^{-iπ/4}
    let pref = i_pow(free.maslov)
        * C64::new(0.0, -PI / 4.0).exp()
        * ((2.0 * PI * hbar).sqrt() * free.det_b.abs().sqrt()).recip()
        * axis.step;
    let (p, l, q) = (free.p[(0, 0)], free.l[(0, 0)], free.q[(0, 0)]);
    let mut out = vec![C64::new(0.0, 0.0); m];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = axis.point(i);
        let mut acc = C64::new(0.0, 0.0);
        for (j, v) in psi.values().iter().enumerate() {
            let xp = axis.point(j);
            let w = 0.5 * p * x * x - l * x * xp + 0.5 * q * xp * xp;
            acc += unit_phase(w / hbar) * v;
        }
        *slot = acc * pref;
    }
    ConfigField::from_values(&grid, out)
}

/// Inverse of the quadratic Fourier transform of `data`.
pub fn quadratic_fourier_inverse(
    data: &MetaplecticData,
    psi: &ConfigField,
) -> Result<ConfigField> {
    let free = data.free.as_ref().ok_or(Error::NotFree(0.0))?;
    quadratic_fourier_from(&free.inverse_data(), psi)
}

/// Apply the metaplectic operator of `S` (up to an overall `i^k`):
/// directly when `S` is free, otherwise through the free factorization
/// `S = (SJ)·J⁻¹`.
pub fn metaplectic_apply(s: &SymplecticMatrix, psi: &ConfigField) -> Result<ConfigField> {
    if let Ok(free) = free_decomposition(s, None) {
        return quadratic_fourier_from(&free, psi);
    }
    let j = SymplecticMatrix::new(crate::symplectic::j_matrix(s.n_dof()))?;
    let sj = s.compose(&j)?;
    let free_sj = free_decomposition(&sj, None)?;
    let free_jinv = free_decomposition(&j.inverse(), None)?;
    quadratic_fourier_from(&free_sj, &quadratic_fourier_from(&free_jinv, psi)?)
}

/// Chirp weight data for the Heisenberg-Weyl superposition of `S`:
/// prefactor `(2πiħ)^{-N} i^ν |det(S-I)|^{-1/2} Δx Δp` and the Cayley
/// quadratic form.
struct MwChirp {
    pref: C64,
    m00: f64,
    m01: f64,
    m11: f64,
    hbar: f64,
}

impl MwChirp {
    fn new(data: &MetaplecticData, grid: &PhaseGrid) -> Result<MwChirp> {
        let ms = data.cayley.as_ref().ok_or(Error::SingularFlow(0.0))?;
        let nu = data.nu.ok_or(Error::SingularFlow(0.0))?;
        let hbar = grid.hbar();
        let det = data.s.mat().sub(&Mat::eye(2)).det();
        if det.abs() < 1e-9 {
            return Err(Error::SingularFlow(det));
        }
        // (2πiħ)^{-1} = -i (2πħ)^{-1}
        let pref = i_pow(nu)
            * C64::new(0.0, -1.0)
            * (grid.cell_volume() / (2.0 * PI * hbar * det.abs().sqrt()));
        Ok(MwChirp { pref, m00: ms[(0, 0)], m01: ms[(0, 1)], m11: ms[(1, 1)], hbar })
    }

    fn weight(&self, x0: f64, p0: f64) -> C64 {
        let quad = self.m00 * x0 * x0 + 2.0 * self.m01 * x0 * p0 + self.m11 * p0 * p0;
        self.pref * unit_phase(0.5 * quad / self.hbar)
    }
}

/// Quadrature lattice for the superpositions: the grid lattice extended by
/// half a box on each side. The outputs live on the original box; the
/// extension lets every output within the box see the full envelope of the
/// shifted field, which keeps box-edge outputs from reading half-truncated
/// chirp integrals.
fn extended_lattice(grid: &PhaseGrid) -> Vec<(f64, f64)> {
    let (mx, mp) = (grid.x.len as isize, grid.p.len as isize);
    let mut pts = Vec::with_capacity(((2 * mx) * (2 * mp)) as usize);
    for a in -(mx / 2)..(3 * mx / 2) {
        let x0 = (a - mx / 2) as f64 * grid.x.step;
        for b in -(mp / 2)..(3 * mp / 2) {
            let p0 = (b - mp / 2) as f64 * grid.p.step;
            pts.push((x0, p0));
        }
    }
    pts
}

/// Smooth gate that is 1 on the inner 70% of each axis and rolls off to 0
/// at 90%. The chirp quadrature converges for fields supported in the
/// bulk; gating input and output enforces that domain, so repeated
/// applications cannot amplify box-edge residue.
fn bulk_gate(field: &PhaseField) -> PhaseField {
    let grid = field.grid().clone();
    let (hx, hp) = (grid.x.extent() / 2.0, grid.p.extent() / 2.0);
    let ramp = |t: f64, h: f64| -> f64 {
        let a = t.abs() / h;
        if a <= 0.70 {
            1.0
        } else if a >= 0.90 {
            0.0
        } else {
            let s = (a - 0.70) / 0.20;
            (0.5 * PI * s).cos().powi(2)
        }
    };
    field.mul_fn(|x, p| C64::new(ramp(x, hx) * ramp(p, hp), 0.0))
}

/// Mehlig-Wilkinson form on configuration space: the lattice quadrature of
/// the `T_Sch(z₀)` superposition (N = 1). Requires `det(S - I) ≠ 0` and a
/// branch integer `ν`.
pub fn mehlig_wilkinson_config(data: &MetaplecticData, psi: &ConfigField) -> Result<ConfigField> {
    if psi.grid().dof() != 1 {
        return Err(Error::UnsupportedDimension { max_dof: 1, got: psi.grid().dof() });
    }
    let grid = PhaseGrid::from_config(psi.grid())?;
    let chirp = MwChirp::new(data, &grid)?;
    let m = grid.x.len as isize;
    let hbar = grid.hbar();
    let kernel = crate::grid::hbar_axis_kernel(&grid.x, hbar);
    let inv_scale = (2.0 * PI * hbar).sqrt() / grid.p.step;

    let mut out = vec![C64::new(0.0, 0.0); m as usize];
    let mut row = vec![C64::new(0.0, 0.0); m as usize];
    let p_period = grid.p.step * grid.p.len as f64;
    // The x₀ axis runs over an extended lattice so box-edge outputs see
    // the full envelope ψ(x - x₀). The p₀ quadrature has no envelope (the
    // Fresnel factor is pure phase), so it is both extended by whole
    // periods — trivial phases at lattice outputs keep the fast-transform
    // structure — and refined to half steps, which doubles the dual range
    // so the chirp's instantaneous frequency stays representable for every
    // output in the box. Half-step rows pick up an extra e^{i Δp x/2ħ}
    // modulation after the transform.
    let subs = [0.0, 0.25, 0.5, 0.75].map(|f| f * grid.p.step);
    let sub_weight = 1.0 / subs.len() as f64;
    // cell offsets ±(M-1): x₀ spans (-L, L) symmetrically
    for roll in (1 - m)..m {
        let x0 = roll as f64 * grid.x.step;
        let (lo, hi) = (roll.max(0) as usize, (m + roll.min(0)) as usize);
        for sub in subs {
            // t(x) = ¼ Σ_b Σ_s w(x₀, p_b + sP + σ) e^{-i(p_b+sP+σ)x₀/2ħ} e^{+i(p_b+σ)x/ħ}
            for (b, slot) in row.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                // range capped at one full period (-P, P): beyond it the
                // Fresnel factor turns commensurate with the output lattice
                // and aliases resonantly instead of cancelling
                for shift in [-1.0, 0.0, 1.0] {
                    let p0 = grid.p.point(b) + shift * p_period + sub;
                    if p0.abs() >= p_period {
                        continue;
                    }
                    acc += chirp.weight(x0, p0) * unit_phase(-0.5 * p0 * x0 / hbar);
                }
                *slot = acc * sub_weight;
            }
            kernel.apply(&mut row, Direction::Inverse);
            // shifted reads ψ(x - x₀) decay rather than wrap
            for out_idx in lo..hi {
                let src = (out_idx as isize - roll) as usize;
                let x = grid.x.point(out_idx);
                out[out_idx] += row[out_idx]
                    * unit_phase(sub * x / hbar)
                    * inv_scale
                    * psi.values()[src];
            }
        }
    }
    ConfigField::from_values(psi.grid(), out)
}

/// Twisted superposition `Σ w(z₀) T_ph(z₀) Ψ` over an explicit entry list
/// `(x₀, p₀, weight)`; shifts must be whole grid cells.
///
/// Shifted reads outside the box are zero, not wrapped: the quadrature
/// approximates the integral over a decaying field, and a periodic wrap
/// would let far-lattice terms of the constant-modulus chirp weight
/// deposit central field mass onto box-edge outputs.
pub(crate) fn tph_superposition(
    field: &PhaseField,
    entries: impl Iterator<Item = (f64, f64, C64)>,
) -> PhaseField {
    let grid = field.grid().clone();
    let (mx, mp) = (grid.x.len as isize, grid.p.len as isize);
    let hbar = grid.hbar();
    let mut out = PhaseField::zeros(&grid);
    // phase vectors over the output lattice
    let mut vx = vec![C64::new(0.0, 0.0); mx as usize];
    let mut vp = vec![C64::new(0.0, 0.0); mp as usize];
    for (sx, sp, w) in entries {
        if w.norm_sqr() < 1e-64 {
            continue;
        }
        let cx = (sx / grid.x.step).round() as isize;
        let cp = (sp / grid.p.step).round() as isize;
        if cx.abs() >= mx || cp.abs() >= mp {
            continue;
        }
        for (ix, slot) in vx.iter_mut().enumerate() {
            *slot = unit_phase(0.5 * sp * grid.x.point(ix) / hbar) * w;
        }
        for (ip, slot) in vp.iter_mut().enumerate() {
            *slot = unit_phase(-0.5 * grid.p.point(ip) * sx / hbar);
        }
        let (ix_lo, ix_hi) = (cx.max(0) as usize, (mx + cx.min(0)) as usize);
        let (ip_lo, ip_hi) = (cp.max(0) as usize, (mp + cp.min(0)) as usize);
        for ix in ix_lo..ix_hi {
            let src_row = (ix as isize - cx) * mp;
            let a = vx[ix];
            let out_row = ix as isize * mp;
            for ip in ip_lo..ip_hi {
                let src = (src_row + ip as isize - cp) as usize;
                out.values_mut()[(out_row + ip as isize) as usize] +=
                    a * vp[ip] * field.values()[src];
            }
        }
    }
    out
}

/// Mehlig-Wilkinson form on phase space: `Σ w(z₀) T_ph(z₀) Ψ` over the
/// extended grid lattice.
pub fn mehlig_wilkinson_phase(data: &MetaplecticData, field: &PhaseField) -> Result<PhaseField> {
    let grid = field.grid().clone();
    let chirp = MwChirp::new(data, &grid)?;
    let entries =
        extended_lattice(&grid).into_iter().map(|(x0, p0)| (x0, p0, chirp.weight(x0, p0)));
    Ok(bulk_gate(&tph_superposition(&bulk_gate(field), entries)))
}

/// Adjoint (= inverse, to quadrature accuracy) of
/// [`mehlig_wilkinson_phase`]: `Σ conj(w(z₀)) T_ph(-z₀) Ψ`.
pub fn mehlig_wilkinson_phase_adjoint(
    data: &MetaplecticData,
    field: &PhaseField,
) -> Result<PhaseField> {
    let grid = field.grid().clone();
    let chirp = MwChirp::new(data, &grid)?;
    let entries = extended_lattice(&grid)
        .into_iter()
        .map(|(x0, p0)| (-x0, -p0, chirp.weight(x0, p0).conj()));
    Ok(bulk_gate(&tph_superposition(&bulk_gate(field), entries)))
}

/// Conjugation residual `‖Ŝ_ph T_ph(z₀) Ŝ_ph⁻¹ Ψ - T_ph(S z₀) Ψ‖ / ‖Ψ‖`.
pub fn tph_conjugation_residual(
    data: &MetaplecticData,
    z0: [f64; 2],
    field: &PhaseField,
) -> Result<f64> {
    let undone = mehlig_wilkinson_phase_adjoint(data, field)?;
    let translated = crate::weyl::hw_phase(z0, 0.0, &undone);
    let lhs = mehlig_wilkinson_phase(data, &translated)?;
    let sz = data.s.apply(&[z0[0], z0[1]]);
    let rhs = crate::weyl::hw_phase([sz[0], sz[1]], 0.0, field);
    Ok(lhs.sub(&rhs)?.norm() / field.norm())
}

/// Metaplectic covariance residual for a polynomial symbol:
/// `max over probes of ‖(A∘S)_ph Ψ - Ŝ_ph⁻¹ Â_ph Ŝ_ph Ψ‖ / ‖Ψ‖`.
pub fn covariance_residual(
    data: &MetaplecticData,
    symbol: &PolySymbol,
    probes: &[PhaseField],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for probe in probes {
        let grid = probe.grid().clone();
        let composed = symbol.compose_linear(data.s.mat());
        let lhs = weyl_quantize_phase(&WeylSymbol::Poly(composed), &grid)?.apply(probe)?;
        let a_op = weyl_quantize_phase(&WeylSymbol::Poly(*symbol), &grid)?;
        let rhs = mehlig_wilkinson_phase_adjoint(
            data,
            &a_op.apply(&mehlig_wilkinson_phase(data, probe)?)?,
        )?;
        worst = worst.max(lhs.sub(&rhs)?.norm() / probe.norm());
    }
    Ok(worst)
}

/// Wigner covariance residual
/// `‖W(Ŝψ, Ŝφ) - W(ψ, φ) ∘ S⁻¹‖ / ‖W(ψ, φ)‖`, with the sesquilinear
/// Wigner pairing and the pullback evaluated by spectral interpolation.
pub fn wigner_covariance_residual(
    s: &SymplecticMatrix,
    psi: &ConfigField,
    phi: &ConfigField,
) -> Result<f64> {
    let spsi = metaplectic_apply(s, psi)?;
    let sphi = metaplectic_apply(s, phi)?;
    let lhs = crate::transforms::wigner_moyal(&spsi, &sphi.conj())?;
    let w0 = crate::transforms::wigner_moyal(psi, &phi.conj())?;

    let grid = w0.grid().clone();
    let sinv = s.inverse();
    let mut pts = Vec::with_capacity(grid.len());
    let mut inside = Vec::with_capacity(grid.len());
    let (hx, hp) = (grid.x.extent() / 2.0, grid.p.extent() / 2.0);
    for ix in 0..grid.x.len {
        for ip in 0..grid.p.len {
            let z = sinv.apply(&[grid.x.point(ix), grid.p.point(ip)]);
            // the interpolant is periodic; outside the box the true
            // distribution has decayed to zero and must not wrap around
            inside.push(z[0].abs() < hx && z[1].abs() < hp);
            pts.push((z[0], z[1]));
        }
    }
    let mut vals = w0.eval_trig(&pts);
    for (v, ok) in vals.iter_mut().zip(&inside) {
        if !ok {
            *v = C64::new(0.0, 0.0);
        }
    }
    let rhs = PhaseField::from_values(&grid, vals)?;
    Ok(lhs.sub(&rhs)?.norm() / w0.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{hermite_state, random_state, standard_gaussian};
    use crate::grid::{hbar_fourier, inner, ConfigGrid};
    use crate::rng::Rng;
    use crate::symplectic::ho_rotation;
    use crate::weyl::hw_phase;

    fn grid128() -> ConfigGrid {
        ConfigGrid::new_1d(128, 12.0, 1.0).unwrap()
    }

    #[test]
    fn quadratic_fourier_of_j_is_scaled_fourier_transform() {
        // Ŝ = i^{-1/2} F for S = J with the zero Maslov branch; on a
        // self-dual lattice (Δp = Δx) the two outputs share their sample
        // points, so they can be compared entry by entry
        let m = 128usize;
        let ext = (2.0 * PI * m as f64).sqrt() / 2.0;
        let grid = ConfigGrid::new_1d(m, ext, 1.0).unwrap();
        assert!(grid.axis(0).approx_eq(&grid.axis(0).dual(1.0)));
        let mut rng = Rng::new(40);
        let psi = random_state(&grid, 6, &mut rng).unwrap();
        let s = SymplecticMatrix::new(crate::symplectic::j_matrix(1)).unwrap();
        let data = MetaplecticData::new(s, None);
        let got = quadratic_fourier(&data, &psi).unwrap();
        let f = hbar_fourier(&psi, Direction::Forward);
        let c = C64::new(0.0, -PI / 4.0).exp();
        let mut err = 0.0f64;
        for (a, b) in got.values().iter().zip(f.values()) {
            err = err.max((a - b * c).norm());
        }
        assert!(err < 1e-9, "J-transform deviation {err:.3e}");
    }

    #[test]
    fn quadratic_fourier_is_unitary_with_inverse_law() {
        let grid = grid128();
        let mut rng = Rng::new(41);
        let psi = random_state(&grid, 6, &mut rng).unwrap();
        let data = MetaplecticData::new(ho_rotation(0.7), None);
        let out = quadratic_fourier(&data, &psi).unwrap();
        assert!((out.norm() - psi.norm()).abs() < 1e-8, "unitarity");
        let back = quadratic_fourier_inverse(&data, &out).unwrap();
        assert!(back.sub(&psi).unwrap().norm() < 1e-7, "inverse law");
    }

    #[test]
    fn composition_agrees_up_to_a_quarter_phase() {
        let grid = grid128();
        let mut rng = Rng::new(42);
        let psi = random_state(&grid, 5, &mut rng).unwrap();
        let (t1, t2) = (0.4 * PI, 0.3 * PI);
        let a = MetaplecticData::new(ho_rotation(t1), None);
        let b = MetaplecticData::new(ho_rotation(t2), None);
        let ab = MetaplecticData::new(ho_rotation(t1 + t2), None);
        let two = quadratic_fourier(&a, &quadratic_fourier(&b, &psi).unwrap()).unwrap();
        let one = quadratic_fourier(&ab, &psi).unwrap();
        // pointwise ratio where the state has support: modulus 1, constant arg
        let mut ratio: Option<C64> = None;
        let mut worst_mod = 0.0f64;
        let mut worst_arg = 0.0f64;
        let scale = one.max_abs();
        for (u, v) in two.values().iter().zip(one.values()) {
            if v.norm() > 0.02 * scale {
                let r = u / v;
                worst_mod = worst_mod.max((r.norm() - 1.0).abs());
                match ratio {
                    None => ratio = Some(r),
                    Some(r0) => worst_arg = worst_arg.max((r / r0).arg().abs()),
                }
            }
        }
        assert!(worst_mod < 1e-6, "modulus deviation {worst_mod:.3e}");
        assert!(worst_arg < 1e-6, "phase wobble {worst_arg:.3e}");
        // the mismatch phase is a quarter power of i
        let r = ratio.unwrap();
        let quarter = (r.arg() / (PI / 2.0)).round() * (PI / 2.0);
        assert!((r.arg() - quarter).abs() < 1e-6, "phase {} not i^k", r.arg());
    }

    #[test]
    fn mehlig_wilkinson_matches_quadratic_fourier_at_quarter_period() {
        // S = rotation by π/2; ν = m - Inert W_xx = 0 there
        let grid = grid128();
        let h0 = hermite_state(0, &grid).unwrap();
        let data = MetaplecticData::new(ho_rotation(PI / 2.0), None);
        assert_eq!(data.nu(), Some(0));
        let mw = mehlig_wilkinson_config(&data, &h0).unwrap();
        let qf = quadratic_fourier(&data, &h0).unwrap();
        let rel = mw.sub(&qf).unwrap().norm() / qf.norm();
        assert!(rel < 1e-5, "relative L2 difference {rel:.3e}");
        // and both equal e^{-iπ/4} h₀ (the true quarter-period evolution)
        let want = h0.scaled(C64::new(0.0, -PI / 4.0).exp());
        assert!(qf.sub(&want).unwrap().norm() < 1e-9);
        assert!(mw.sub(&want).unwrap().norm() < 1e-5);
    }

    #[test]
    fn mehlig_wilkinson_parity_at_half_period() {
        // S = -I is not free; its superposition acts as a parity operator
        let grid = grid128();
        let mut rng = Rng::new(44);
        let psi = random_state(&grid, 4, &mut rng).unwrap();
        let s = SymplecticMatrix::new(Mat::diag(&[-1.0, -1.0])).unwrap();
        let data = MetaplecticData::new(s, None).with_nu(0);
        let out = mehlig_wilkinson_config(&data, &psi).unwrap();
        // compare against ψ(-x) up to one global unit-modulus constant
        let m = grid.axis(0).len;
        let mirrored: Vec<C64> = (0..m).map(|i| psi.values()[(m - i) % m]).collect();
        let mirrored = ConfigField::from_values(&grid, mirrored).unwrap();
        let c = inner(&out, &mirrored).unwrap() / mirrored.norm_sq();
        assert!((c.norm() - 1.0).abs() < 1e-6, "|c| = {}", c.norm());
        let res = out.sub(&mirrored.scaled(c)).unwrap().norm();
        assert!(res < 1e-6, "parity residual {res:.3e}");
        assert!((out.norm() - psi.norm()).abs() < 1e-6, "unitarity");
    }

    #[test]
    fn phase_superposition_matches_change_of_variables_form() {
        // Ŝ_ph = (2πiħ)^{-N} i^ν √|det(S-I)| Σ_z e^{-(i/2ħ) Sz∧z} T_ph((S-I)z):
        // compared on a self-dual lattice with S = J, where (S - I) maps
        // lattice points to lattice points and both sides are evaluated by
        // the same zero-fill twisted sum
        let hbar = 1.0;
        let m = 64usize;
        let ext = (2.0 * PI * hbar * m as f64).sqrt() / 2.0;
        let grid = PhaseGrid::standard(m, ext, hbar).unwrap();
        assert!(grid.x.approx_eq(&grid.p));
        let psi = PhaseField::from_fn(&grid, |x, p| {
            C64::new((-(x * x + p * p) / (4.0 * hbar)).exp(), 0.0)
        });
        let s = SymplecticMatrix::new(crate::symplectic::j_matrix(1)).unwrap();
        let data = MetaplecticData::new(s.clone(), None);
        let direct = mehlig_wilkinson_phase(&data, &psi).unwrap();

        let det = s.mat().sub(&Mat::eye(2)).det();
        let pref = i_pow(data.nu().unwrap())
            * C64::new(0.0, -1.0)
            * (det.abs().sqrt() * grid.cell_volume() / (2.0 * PI * hbar));
        let (mx, mp) = (grid.x.len as isize, grid.p.len as isize);
        let mut entries = alloc::vec::Vec::new();
        for a in -(mx / 2)..(3 * mx / 2) {
            for b in -(mp / 2)..(3 * mp / 2) {
                let z = [
                    (a - mx / 2) as f64 * grid.x.step,
                    (b - mp / 2) as f64 * grid.p.step,
                ];
                let sz = s.mat().matvec(&z);
                let szwz = crate::symplectic::symplectic_form(&sz, &z).unwrap();
                let shift = [sz[0] - z[0], sz[1] - z[1]];
                entries.push((shift[0], shift[1], pref * unit_phase(-0.5 * szwz / hbar)));
            }
        }
        let alt = tph_superposition(&psi, entries.into_iter());
        let rel = direct.sub(&alt).unwrap().norm() / direct.norm();
        assert!(rel < 1e-5, "superposition forms disagree: {rel:.3e}");
    }

    #[test]
    fn phase_superposition_is_unitary_and_invertible() {
        let hbar = 1.0;
        let cgrid = ConfigGrid::new_1d(128, 12.0, hbar).unwrap();
        let window =
            crate::transforms::WavePacketWindow::new(&standard_gaussian(&cgrid)).unwrap();
        let mut rng = Rng::new(45);
        let psi = random_state(&cgrid, 4, &mut rng).unwrap();
        let field = crate::transforms::wavepacket(&window, &psi).unwrap();
        let data = MetaplecticData::new(ho_rotation(2.0 * PI / 3.0), None);
        let moved = mehlig_wilkinson_phase(&data, &field).unwrap();
        assert!((moved.norm() - field.norm()).abs() < 1e-6, "unitarity");
        let back = mehlig_wilkinson_phase_adjoint(&data, &moved).unwrap();
        let rel = back.sub(&field).unwrap().norm() / field.norm();
        assert!(rel < 1e-5, "adjoint-inverse residual {rel:.3e}");
    }

    #[test]
    fn tph_conjugation_moves_the_translation() {
        let hbar = 1.0;
        let cgrid = ConfigGrid::new_1d(128, 12.0, hbar).unwrap();
        let window =
            crate::transforms::WavePacketWindow::new(&standard_gaussian(&cgrid)).unwrap();
        let mut rng = Rng::new(46);
        let psi = random_state(&cgrid, 3, &mut rng).unwrap();
        let field = crate::transforms::wavepacket(&window, &psi).unwrap();
        let grid = field.grid().clone();
        let data = MetaplecticData::new(ho_rotation(2.0 * PI / 3.0), None);
        let z0 = [4.0 * grid.x.step, -3.0 * grid.p.step];
        let res = tph_conjugation_residual(&data, z0, &field).unwrap();
        assert!(res < 1e-5, "conjugation residual {res:.3e}");
    }

    #[test]
    fn covariance_examples() {
        let hbar = 1.0;
        let cgrid = ConfigGrid::new_1d(128, 12.0, hbar).unwrap();
        let window =
            crate::transforms::WavePacketWindow::new(&standard_gaussian(&cgrid)).unwrap();
        let mut rng = Rng::new(47);
        let probes: Vec<PhaseField> = (0..1)
            .map(|_| {
                let psi = random_state(&cgrid, 3, &mut rng).unwrap();
                crate::transforms::wavepacket(&window, &psi).unwrap()
            })
            .collect();

        // rotations preserve the radial oscillator symbol
        let data = MetaplecticData::new(ho_rotation(2.0 * PI / 3.0), None);
        let res = covariance_residual(&data, &PolySymbol::harmonic(1.0), &probes).unwrap();
        assert!(res < 1e-5, "HO covariance residual {res:.3e}");

        // A = x composed with J is A∘J = p
        let j = SymplecticMatrix::new(crate::symplectic::j_matrix(1)).unwrap();
        let composed = PolySymbol::position().compose_linear(j.mat());
        assert_eq!(composed, PolySymbol::momentum());
        let data_j = MetaplecticData::new(j, None);
        let res = covariance_residual(&data_j, &PolySymbol::position(), &probes).unwrap();
        assert!(res < 1e-5, "linear covariance residual {res:.3e}");

        // det(S - I) = 0 is rejected
        let ident = MetaplecticData::new(SymplecticMatrix::identity(1), None);
        assert!(matches!(
            covariance_residual(&ident, &PolySymbol::position(), &probes),
            Err(Error::SingularFlow(_))
        ));
    }

    #[test]
    fn wigner_covariance_for_rotation_and_squeeze() {
        let grid = ConfigGrid::new_1d(64, 10.0, 1.0).unwrap();
        let phi = standard_gaussian(&grid);

        // J leaves the radial Gaussian Wigner function invariant
        let j = SymplecticMatrix::new(crate::symplectic::j_matrix(1)).unwrap();
        let res = wigner_covariance_residual(&j, &phi, &phi).unwrap();
        assert!(res < 1e-5, "J residual {res:.3e}");

        // squeeze diag(2, 1/2): not free, factored path; the squeezed
        // Wigner function is the closed-form Gaussian e^{-(x²/4 + 4p²)/ħ}.
        // The widened state's Wigner transform integrates over twice its
        // support, so this case runs in a larger box.
        let grid = ConfigGrid::new_1d(128, 16.0, 1.0).unwrap();
        let phi = standard_gaussian(&grid);
        let s = SymplecticMatrix::new(Mat::diag(&[2.0, 0.5])).unwrap();
        let res = wigner_covariance_residual(&s, &phi, &phi).unwrap();
        assert!(res < 1e-4, "squeeze residual {res:.3e}");
        let spsi = metaplectic_apply(&s, &phi).unwrap();
        let w = crate::transforms::wigner_moyal(&spsi, &spsi.conj()).unwrap();
        let g = w.grid().clone();
        let mut err = 0.0f64;
        for ix in 0..g.x.len {
            let x = g.x.point(ix);
            for ip in 0..g.p.len {
                let p = g.p.point(ip);
                let want = (PI).recip() * (-(x * x / 4.0 + 4.0 * p * p)).exp();
                err = err.max((w.get(ix, ip) - C64::new(want, 0.0)).norm());
            }
        }
        assert!(err * PI < 1e-4, "squeezed Wigner function error {err:.3e}");

        // identity limit: direct comparison
        let ident = SymplecticMatrix::identity(1);
        let res = wigner_covariance_residual(&ident, &phi, &phi).unwrap();
        assert!(res < 1e-10, "identity residual {res:.3e}");
    }

    #[test]
    fn nu_is_stable_across_maslov_branches() {
        // the two admissible arg det B branches differ by 2 mod 4; so do
        // the derived ν, leaving i^ν fixed up to overall sign pairing
        let s = ho_rotation(PI / 2.0);
        let a = MetaplecticData::new(s.clone(), Some(0));
        let b = MetaplecticData::new(s, Some(2));
        let (na, nb) = (a.nu().unwrap(), b.nu().unwrap());
        assert_eq!((nb - na).rem_euclid(4), 2);
    }
}
