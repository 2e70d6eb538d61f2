//! Probabilistic interpretation: marginal densities of `|Ψ|²`, expectation
//! values through both calculi, and the small-ħ concentration study.
//!
//! For `Ψ = U_φψ` the marginals are smoothed densities,
//! `∫|Ψ|² dp = (|φ|² ∗ |ψ|²)(x)` and `∫|Ψ|² dx = (|Fφ|² ∗ |Fψ|²)(p)`,
//! which converge to `|ψ|²` and `|Fψ|²` as the window shrinks with ħ.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::fft::Fft;

use crate::grid::{hbar_fourier, inner, ConfigField, ConfigGrid, Direction, PhaseField};
use crate::transforms::{wavepacket, WavePacketWindow};
use crate::weyl::{weyl_quantize_config, weyl_quantize_phase, PolySymbol, WeylSymbol};
use crate::Result;

/// One marginal density of `|Ψ|²` with an optional closed-form reference.
#[derive(Debug, Clone)]
pub struct MarginalReport {
    /// Axis sample points.
    pub axis: Vec<f64>,
    /// Quadrature of `|Ψ|²` over the other axis.
    pub density: Vec<f64>,
    /// Full integral; matches `‖Ψ‖²` by construction.
    pub total_mass: f64,
    /// Reference density, when one was supplied.
    pub reference: Option<Vec<f64>>,
    /// `sup |density - reference|`, when a reference was supplied.
    pub sup_error: Option<f64>,
}

fn marginal(field: &PhaseField, over_p: bool) -> Result<MarginalReport> {
    let grid = field.grid().clone();
    let (keep, other_step) =
        if over_p { (grid.x.clone(), grid.p.step) } else { (grid.p.clone(), grid.x.step) };
    let mut density = vec![0.0f64; keep.len];
    for ix in 0..grid.x.len {
        for ip in 0..grid.p.len {
            let v = field.get(ix, ip).norm_sqr();
            let idx = if over_p { ix } else { ip };
            density[idx] += v * other_step;
        }
    }
    let total_mass: f64 = density.iter().sum::<f64>() * keep.step;
    let norm_sq = field.norm_sq();
    if density.iter().any(|&d| d < -1e-12) {
        return Err(Error::NotPositiveDefinite(density.iter().cloned().fold(0.0, f64::min)));
    }
    if (total_mass - norm_sq).abs() > 1e-8 * norm_sq.max(1.0) {
        return Err(Error::DimensionMismatch { expected: 0, got: 1 });
    }
    Ok(MarginalReport { axis: keep.points(), density, total_mass, reference: None, sup_error: None })
}

/// Position marginal `∫ |Ψ(x, p)|² dp`.
pub fn marginal_x(field: &PhaseField) -> Result<MarginalReport> {
    marginal(field, true)
}

/// Momentum marginal `∫ |Ψ(x, p)|² dx`.
pub fn marginal_p(field: &PhaseField) -> Result<MarginalReport> {
    marginal(field, false)
}

/// Circular convolution of two real densities sampled on one axis, with
/// the kernel indexed by offsets from the origin of a centered axis.
fn convolve_densities(kernel: &[f64], f: &[f64], step: f64) -> Vec<f64> {
    let m = kernel.len();
    let fft = Fft::new(m);
    // reindex the kernel so entry d holds its value at offset d·Δ
    let mut k: Vec<C64> =
        (0..m).map(|d| C64::new(kernel[(d + m / 2) % m] * step, 0.0)).collect();
    let mut g: Vec<C64> = f.iter().map(|&v| C64::new(v, 0.0)).collect();
    fft.forward(&mut k);
    fft.forward(&mut g);
    for (a, b) in g.iter_mut().zip(&k) {
        *a *= b;
    }
    fft.inverse(&mut g);
    g.iter().map(|v| v.re).collect()
}

/// Position marginal of `U_φψ` together with the smoothed reference
/// `(|φ|² ∗ |ψ|²)(x)`.
pub fn marginal_x_with_reference(
    window: &WavePacketWindow,
    psi: &ConfigField,
) -> Result<MarginalReport> {
    let field = wavepacket(window, psi)?;
    let mut report = marginal_x(&field)?;
    let phi_sq: Vec<f64> = window.field().values().iter().map(|v| v.norm_sqr()).collect();
    let psi_sq: Vec<f64> = psi.values().iter().map(|v| v.norm_sqr()).collect();
    let reference = convolve_densities(&phi_sq, &psi_sq, psi.grid().axis(0).step);
    let sup = report
        .density
        .iter()
        .zip(&reference)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    report.reference = Some(reference);
    report.sup_error = Some(sup);
    Ok(report)
}

/// Momentum marginal of `U_φψ` together with the Fourier-side reference
/// `(|Fφ|² ∗ |Fψ|²)(p)`.
pub fn marginal_p_with_reference(
    window: &WavePacketWindow,
    psi: &ConfigField,
) -> Result<MarginalReport> {
    let field = wavepacket(window, psi)?;
    let mut report = marginal_p(&field)?;
    let fphi = hbar_fourier(window.field(), Direction::Forward);
    let fpsi = hbar_fourier(psi, Direction::Forward);
    let phi_sq: Vec<f64> = fphi.values().iter().map(|v| v.norm_sqr()).collect();
    let psi_sq: Vec<f64> = fpsi.values().iter().map(|v| v.norm_sqr()).collect();
    let reference = convolve_densities(&phi_sq, &psi_sq, fpsi.grid().axis(0).step);
    let sup = report
        .density
        .iter()
        .zip(&reference)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    report.reference = Some(reference);
    report.sup_error = Some(sup);
    Ok(report)
}

/// Expectation of a polynomial symbol in the state `ψ`, evaluated through
/// both calculi: `(Â_Sch ψ, ψ)` and `((Â_ph U_φψ, U_φψ))`. Returns the
/// pair `(config, phase)`.
pub fn expectation(
    symbol: &PolySymbol,
    window: &WavePacketWindow,
    psi: &ConfigField,
) -> Result<(C64, C64)> {
    let config_side = inner(&weyl_quantize_config(&WeylSymbol::Poly(*symbol), psi)?, psi)?;
    let u = wavepacket(window, psi)?;
    let op = weyl_quantize_phase(&WeylSymbol::Poly(*symbol), u.grid())?;
    let phase_side = crate::grid::inner_phase(&op.apply(&u)?, &u)?;
    Ok((config_side, phase_side))
}

/// One row of the ħ-sweep report.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub hbar: f64,
    /// `sup |∫|Ψ|²dp - |ψ|²|`
    pub sup_x: f64,
    /// `sup |∫|Ψ|²dx - |Fψ|²|`
    pub sup_p: f64,
}

/// Concentration study. For each ħ the standard window smooths the
/// position density of a unit-x-width state and the momentum density of a
/// unit-p-width state; both sup deficits shrink as `|φ_ħ|² → δ`.
///
/// The transform pair is ħ-scaled, so a single fixed state cannot have
/// ħ-independent densities on both axes (its momentum profile is itself an
/// ħ-shrinking spike, against which no smoothing deficit can vanish). The
/// recovery statement applies per axis to the family whose target profile
/// stays fixed, which is what is measured here.
///
/// Grids are rebuilt per ħ on `m` points so that resolution tracks the
/// shrinking structures; `hbars` must be strictly decreasing.
pub fn hbar_limit_study(hbars: &[f64], m: usize) -> Result<(Vec<SweepRow>, bool)> {
    if hbars.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidBounds);
    }
    let mut rows = Vec::with_capacity(hbars.len());
    for &hbar in hbars {
        rows.push(sweep_row(hbar, m, 1.0)?);
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].sup_x < w[0].sup_x && w[1].sup_p < w[0].sup_p);
    Ok((rows, monotone))
}

/// One sweep evaluation with a window of width `width_scale·√ħ`.
pub fn sweep_row(hbar: f64, m: usize, width_scale: f64) -> Result<SweepRow> {
    let pi = core::f64::consts::PI;
    let sigma2 = width_scale * width_scale * hbar;

    // position side: unit-x-width state, target |ψ(x)|²
    let grid = ConfigGrid::new_1d(m, 7.0, hbar)?;
    let psi = ConfigField::from_fn(&grid, |x| {
        C64::new(pi.powf(-0.25) * (-x[0] * x[0] / 2.0).exp(), 0.0)
    });
    let phi =
        ConfigField::from_fn(&grid, |x| C64::new((-x[0] * x[0] / (2.0 * sigma2)).exp(), 0.0));
    let window = WavePacketWindow::new(&phi)?;
    let field = wavepacket(&window, &psi)?;
    let mx = marginal_x(&field)?;
    let sup_x = mx.axis.iter().zip(&mx.density).fold(0.0f64, |mk, (&x, &d)| {
        let want = pi.powf(-0.5) * (-x * x).exp();
        mk.max((d - want).abs())
    });

    // momentum side: unit-p-width state (x-width ħ), target |Fψ(p)|²,
    // sampled on a grid fine enough to resolve the narrow state
    let ext = 8.0 * hbar.sqrt().max(hbar);
    let grid_p = ConfigGrid::new_1d(m, ext, hbar)?;
    let chi = ConfigField::from_fn(&grid_p, |x| {
        C64::new(
            (pi * hbar * hbar).powf(-0.25) * (-x[0] * x[0] / (2.0 * hbar * hbar)).exp(),
            0.0,
        )
    });
    let phi_p =
        ConfigField::from_fn(&grid_p, |x| C64::new((-x[0] * x[0] / (2.0 * sigma2)).exp(), 0.0));
    let window_p = WavePacketWindow::new(&phi_p)?;
    let field_p = wavepacket(&window_p, &chi)?;
    let mp = marginal_p(&field_p)?;
    let fchi = hbar_fourier(&chi, Direction::Forward);
    let sup_p = mp
        .density
        .iter()
        .enumerate()
        .fold(0.0f64, |mk, (k, &d)| mk.max((d - fchi.values()[k].norm_sqr()).abs()));
    Ok(SweepRow { hbar, sup_x, sup_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{hermite_state, standard_gaussian};
    use crate::grid::PhaseGrid;
    use crate::rng::Rng;
    use crate::weyl::hw_config;
    use core::f64::consts::PI;

    #[test]
    fn gaussian_marginals_match_the_convolution_closed_form() {
        let hbar = 1.0;
        let grid = ConfigGrid::new_1d(256, 12.0, hbar).unwrap();
        let phi = standard_gaussian(&grid);
        let window = WavePacketWindow::new(&phi).unwrap();

        // |φ|² ∗ |φ|² is the centered Gaussian with doubled variance:
        // (2πħ)^{-1/2} e^{-x²/2ħ}
        let report = marginal_x_with_reference(&window, &phi).unwrap();
        let mut err = 0.0f64;
        for (&x, &d) in report.axis.iter().zip(&report.density) {
            let want = (2.0 * PI * hbar).powf(-0.5) * (-x * x / (2.0 * hbar)).exp();
            err = err.max((d - want).abs());
        }
        assert!(err < 1e-8, "closed-form marginal error {err:.3e}");
        assert!(report.sup_error.unwrap() < 1e-10, "reference disagrees");
        assert!((report.total_mass - 1.0).abs() < 1e-8);

        // same density on the momentum side by symmetry
        let report_p = marginal_p_with_reference(&window, &phi).unwrap();
        assert!(report_p.sup_error.unwrap() < 1e-10);
        assert!((report_p.total_mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn first_excited_state_marginal_against_reference() {
        let grid = ConfigGrid::new_1d(256, 14.0, 1.0).unwrap();
        let window = WavePacketWindow::new(&standard_gaussian(&grid)).unwrap();
        let h1 = hermite_state(1, &grid).unwrap();
        let report = marginal_p_with_reference(&window, &h1).unwrap();
        assert!(report.sup_error.unwrap() < 1e-7, "{:?}", report.sup_error);
        assert!((report.total_mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_field_has_zero_density() {
        let grid = PhaseGrid::standard(64, 8.0, 1.0).unwrap();
        let report = marginal_x(&crate::grid::PhaseField::zeros(&grid)).unwrap();
        assert!(report.density.iter().all(|&d| d == 0.0));
        assert_eq!(report.total_mass, 0.0);
    }

    #[test]
    fn expectations_agree_between_calculi() {
        let hbar = 1.0;
        let grid = ConfigGrid::new_1d(128, 12.0, hbar).unwrap();
        let window = WavePacketWindow::new(&standard_gaussian(&grid)).unwrap();

        // translated Gaussian has mean position a
        let a = 1.0;
        let shifted = hw_config(&[a, 0.0], 0.0, &standard_gaussian(&grid)).unwrap();
        let (c, p) = expectation(&PolySymbol::position(), &window, &shifted).unwrap();
        assert!((c.re - a).abs() < 1e-7 && c.im.abs() < 1e-10, "config side {c}");
        assert!((p.re - a).abs() < 1e-7 && p.im.abs() < 1e-9, "phase side {p}");

        // oscillator ground-state energy ħω/2
        let omega = 1.3;
        let h0 = hermite_state(0, &grid).unwrap();
        let (c, p) = expectation(&PolySymbol::harmonic(omega), &window, &h0).unwrap();
        assert!((c.re - 0.5 * omega).abs() < 1e-7, "config side {c}");
        assert!((p.re - 0.5 * omega).abs() < 1e-7, "phase side {p}");

        // unit symbol gives exactly the squared norm
        let (c, p) = expectation(&PolySymbol { c0: 1.0, ..PolySymbol::default() }, &window, &h0)
            .unwrap();
        assert!((c.re - 1.0).abs() < 1e-12);
        assert!((p.re - 1.0).abs() < 1e-9);

        // both calculi agree on all degree ≤ 2 monomials for excited states
        let mut rng = Rng::new(3);
        let _ = &mut rng;
        for n in 0..3 {
            let hn = hermite_state(n, &grid).unwrap();
            for sym in [
                PolySymbol::position(),
                PolySymbol::momentum(),
                PolySymbol { cxx: 1.0, ..PolySymbol::default() },
                PolySymbol { cpp: 1.0, ..PolySymbol::default() },
                PolySymbol { cxp: 1.0, ..PolySymbol::default() },
            ] {
                let (c, p) = expectation(&sym, &window, &hn).unwrap();
                assert!((c - p).norm() < 1e-7, "n={n} {sym:?}: {c} vs {p}");
            }
        }
    }

    #[test]
    fn hbar_sweep_is_monotone() {
        let (rows, monotone) = hbar_limit_study(&[1.0, 0.25, 0.0625], 256).unwrap();
        assert!(monotone, "{rows:?}");
        // smoothing error is strictly positive away from the limit
        assert!(rows[0].sup_x > 1e-3);
        assert!(rows.last().unwrap().sup_x < rows[0].sup_x);
    }

    #[test]
    fn widening_the_window_increases_the_position_error() {
        let narrow = sweep_row(1.0, 256, 1.0).unwrap();
        let wide = sweep_row(1.0, 256, 2.0).unwrap();
        assert!(wide.sup_x > narrow.sup_x);
        // and sharpens the momentum window (uncertainty trade-off)
        assert!(wide.sup_p < narrow.sup_p);
    }

    #[test]
    fn hbar_list_must_decrease() {
        assert!(hbar_limit_study(&[0.25, 1.0], 128).is_err());
    }
}
