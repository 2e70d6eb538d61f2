//! Gaussian and Hermite states, Wigner forms of Gaussians, and the
//! quantum-state conditions for Wigner ellipsoids.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::grid::{ConfigField, ConfigGrid, PhaseField, PhaseGrid};
use crate::linalg::{hermitian_eigenvalues, sym_eigen, Mat};
use crate::symplectic::{
    capacity, is_symplectic, j_matrix, williamson, WignerEllipsoid, SYMPLECTIC_TOL,
};
use crate::transforms::{range_residual, WavePacketWindow};
use crate::Result;

/// The standard Gaussian `φ_ħ(x) = (πħ)^{-N/4} e^{-|x|²/2ħ}`, unit norm.
pub fn standard_gaussian(grid: &ConfigGrid) -> ConfigField {
    let h = grid.hbar();
    let n = grid.dof() as f64;
    let c = (PI * h).powf(-n / 4.0);
    ConfigField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        C64::new(c * (-r2 / (2.0 * h)).exp(), 0.0)
    })
}

/// `n`-th normalized Hermite function of width `√ħ` (one degree of
/// freedom), generated by the stable three-term recurrence.
pub fn hermite_state(n: usize, grid: &ConfigGrid) -> Result<ConfigField> {
    if grid.dof() != 1 {
        return Err(Error::UnsupportedDimension { max_dof: 1, got: grid.dof() });
    }
    if n > 10 {
        return Err(Error::DimensionMismatch { expected: 10, got: n });
    }
    let h = grid.hbar();
    let scale = h.powf(-0.25);
    Ok(ConfigField::from_fn(grid, |x| {
        let xi = x[0] / h.sqrt();
        let mut u_prev = 0.0f64;
        let mut u = PI.powf(-0.25) * (-xi * xi / 2.0).exp();
        for k in 0..n {
            let kf = k as f64;
            let next = (2.0 / (kf + 1.0)).sqrt() * xi * u - (kf / (kf + 1.0)).sqrt() * u_prev;
            u_prev = u;
            u = next;
        }
        C64::new(scale * u, 0.0)
    }))
}

/// Random normalized superposition of Hermite states up to `max_order`
/// (one degree of freedom): a reproducible supply of smooth, rapidly
/// decaying, band-limited test states for the property suites.
pub fn random_state(
    grid: &ConfigGrid,
    max_order: usize,
    rng: &mut crate::rng::Rng,
) -> Result<ConfigField> {
    let mut acc = ConfigField::zeros(grid);
    for n in 0..=max_order {
        let h = hermite_state(n, grid)?;
        let c = rng.complex_normal();
        acc = acc.add(&h.scaled(c))?;
    }
    let nrm = acc.norm();
    if !(nrm > 1e-12) {
        return Err(Error::ZeroNorm);
    }
    Ok(acc.scaled(C64::new(1.0 / nrm, 0.0)))
}

/// Parameters of a Gaussian state.
///
/// `Config`: `ψ(x) ∝ e^{-(X+iY)x·x/2ħ}` with `X` symmetric positive
/// definite and `Y` symmetric (the stored state is unit-normalized).
/// `Phase`: `Ψ_G(z) = e^{-G z·z/2ħ}` with `G` symmetric positive definite.
#[derive(Debug, Clone)]
pub enum GaussianParams {
    Config { x: Mat, y: Mat, hbar: f64 },
    Phase { g: Mat, hbar: f64 },
}

impl GaussianParams {
    pub fn config(x: Mat, y: Mat, hbar: f64) -> Result<GaussianParams> {
        if !(hbar > 0.0) {
            return Err(Error::NonPositiveHbar);
        }
        let dx = x.symmetry_defect();
        if dx >= 1e-10 * x.norm_max().max(1.0) {
            return Err(Error::NotSymmetric(dx));
        }
        let dy = y.symmetry_defect();
        if dy >= 1e-10 * y.norm_max().max(1.0) {
            return Err(Error::NotSymmetric(dy));
        }
        let (ev, _) = sym_eigen(&x);
        if ev[0] <= 0.0 {
            return Err(Error::NotPositiveDefinite(ev[0]));
        }
        Ok(GaussianParams::Config { x: x.symmetrized(), y: y.symmetrized(), hbar })
    }

    pub fn phase(g: Mat, hbar: f64) -> Result<GaussianParams> {
        if !(hbar > 0.0) {
            return Err(Error::NonPositiveHbar);
        }
        let d = g.symmetry_defect();
        if d >= 1e-10 * g.norm_max().max(1.0) {
            return Err(Error::NotSymmetric(d));
        }
        let (ev, _) = sym_eigen(&g);
        if ev[0] <= 0.0 {
            return Err(Error::NotPositiveDefinite(ev[0]));
        }
        Ok(GaussianParams::Phase { g: g.symmetrized(), hbar })
    }

    pub fn hbar(&self) -> f64 {
        match self {
            GaussianParams::Config { hbar, .. } | GaussianParams::Phase { hbar, .. } => *hbar,
        }
    }
}

/// Wigner form of a configuration Gaussian: for `ψ ∝ e^{-(X+iY)x²/2ħ}` the
/// Wigner transform is `Wψ(z) = (πħ)^{-N} e^{-G z·z/ħ}` with
/// `G = [[X + YX⁻¹Y, YX⁻¹], [X⁻¹Y, X⁻¹]]`, always symmetric, positive
/// definite and symplectic. Both properties are certified here.
pub fn gaussian_wigner(params: &GaussianParams) -> Result<GaussianParams> {
    let (x, y, hbar) = match params {
        GaussianParams::Config { x, y, hbar } => (x, y, *hbar),
        GaussianParams::Phase { .. } => {
            return Err(Error::DimensionMismatch { expected: 0, got: 1 })
        }
    };
    let n = x.nrows();
    let xinv = x.inverse().ok_or(Error::NotPositiveDefinite(0.0))?;
    let yxy = y.mul(&xinv).mul(y);
    let mut g = Mat::zeros(2 * n, 2 * n);
    let tl = x.add(&yxy);
    let tr = y.mul(&xinv);
    let bl = xinv.mul(y);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = tl[(i, j)];
            g[(i, n + j)] = tr[(i, j)];
            g[(n + i, j)] = bl[(i, j)];
            g[(n + i, n + j)] = xinv[(i, j)];
        }
    }
    let g = g.symmetrized();
    if !is_symplectic(&g, SYMPLECTIC_TOL)? {
        return Err(Error::NotSymplectic(crate::symplectic::symplectic_defect(&g)));
    }
    GaussianParams::phase(g, hbar)
}

/// Sample the unit-normalized configuration Gaussian
/// `ψ(x) = (det X)^{1/4} (πħ)^{-N/4} e^{-(X+iY)x·x/2ħ}` on a grid.
pub fn sample_config_gaussian(params: &GaussianParams, grid: &ConfigGrid) -> Result<ConfigField> {
    let (x, y, hbar) = match params {
        GaussianParams::Config { x, y, hbar } => (x.clone(), y.clone(), *hbar),
        GaussianParams::Phase { .. } => {
            return Err(Error::DimensionMismatch { expected: 0, got: 1 })
        }
    };
    if grid.dof() != x.nrows() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), got: grid.dof() });
    }
    if (grid.hbar() - hbar).abs() > 1e-12 * hbar {
        return Err(Error::GridMismatch);
    }
    let nf = grid.dof() as f64;
    let c = x.det().powf(0.25) * (PI * hbar).powf(-nf / 4.0);
    Ok(ConfigField::from_fn(grid, |xs| {
        let xv = x.matvec(xs);
        let yv = y.matvec(xs);
        let qx: f64 = xs.iter().zip(&xv).map(|(a, b)| a * b).sum();
        let qy: f64 = xs.iter().zip(&yv).map(|(a, b)| a * b).sum();
        C64::new(c, 0.0) * (C64::new(-qx, -qy) / (2.0 * hbar)).exp()
    }))
}

/// Sample the phase-space Gaussian `Ψ_G(z) = e^{-G z·z/2ħ}` (N = 1).
pub fn sample_phase_gaussian(g: &Mat, grid: &PhaseGrid) -> Result<PhaseField> {
    if g.nrows() != 2 {
        return Err(Error::UnsupportedDimension { max_dof: 1, got: g.nrows() / 2 });
    }
    let hbar = grid.hbar();
    Ok(PhaseField::from_fn(grid, |x, p| {
        let q = g[(0, 0)] * x * x + 2.0 * g[(0, 1)] * x * p + g[(1, 1)] * p * p;
        C64::new((-q / (2.0 * hbar)).exp(), 0.0)
    }))
}

/// Outcome of [`phase_gaussian_range_check`].
#[derive(Debug, Clone)]
pub struct RangeCheckReport {
    /// Relative distance of `Ψ_G` from the range of the wave-packet
    /// transform with the given window.
    pub residual: f64,
    /// The rescaled matrix `2G` whose symplecticity characterizes the
    /// Gaussians reachable with a matched Gaussian window.
    pub rescaled: Mat,
    /// `2G ∈ Sp(N)`?
    pub symplectic_2g: bool,
    /// `G ∈ Sp(N)`?
    pub symplectic_g: bool,
}

/// Sample `Ψ_G` on the window's phase grid, project onto the range of the
/// wave-packet transform, and report the residual alongside both
/// symplecticity verdicts (`G` and `2G`).
pub fn phase_gaussian_range_check(
    g: &Mat,
    window: &WavePacketWindow,
) -> Result<RangeCheckReport> {
    let grid = PhaseGrid::from_config(window.field().grid())?;
    let psi = sample_phase_gaussian(g, &grid)?;
    let residual = range_residual(window, &psi)?;
    Ok(RangeCheckReport {
        residual,
        rescaled: g.scale(2.0),
        symplectic_2g: is_symplectic(&g.scale(2.0), SYMPLECTIC_TOL)?,
        symplectic_g: is_symplectic(g, SYMPLECTIC_TOL)?,
    })
}

/// Quantum-state condition for the Gaussian `exp(-M z·z/ħ)`: all
/// eigenvalues of the Hermitian matrix `M⁻¹ + iJ` must be ≥ -1e-10.
/// Equivalent to [`crate::symplectic::uncertainty_check`] on
/// `Σ = (ħ/2)M⁻¹` and to `capacity ≥ πħ`.
pub fn quantum_state_check(e: &WignerEllipsoid) -> Result<(bool, Vec<f64>)> {
    let minv = e.matrix().inverse().ok_or(Error::NotPositiveDefinite(0.0))?;
    let n = minv.nrows() / 2;
    let evals = hermitian_eigenvalues(&minv.symmetrized(), &j_matrix(n));
    let ok = evals.iter().all(|&v| v >= -1e-10);
    Ok((ok, evals))
}

/// Pure-state Gaussian canonically associated to an ellipsoid of capacity
/// exactly `πħ`: with the Williamson form `M = S_wᵀ D S_w`, returns
/// `G = S_wᵀ S_w`. Unique because the Williamson freedom is orthogonal.
/// For N = 1 this reproduces `M` itself.
pub fn quantum_blob_purify(e: &WignerEllipsoid) -> Result<GaussianParams> {
    let cap = capacity(e)?;
    let want = PI * e.hbar();
    if (cap - want).abs() >= 1e-8 * want {
        return Err(Error::CapacityNotHalfQuantum { capacity: cap, expected: want });
    }
    let (s, _) = williamson(e.matrix())?;
    let g = s.mat().t().mul(s.mat()).symmetrized();
    GaussianParams::phase(g, e.hbar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{hbar_fourier, inner, Direction};
    use crate::rng::Rng;
    use crate::symplectic::uncertainty_check;

    #[test]
    fn standard_gaussian_normalization_and_peak() {
        let grid = ConfigGrid::new_1d(256, 12.0, 1.0).unwrap();
        let phi = standard_gaussian(&grid);
        assert!((phi.norm() - 1.0).abs() < 1e-10);
        // φ(0) = (πħ)^{-1/4}
        let mid = phi.values()[128];
        assert!((mid.re - PI.powf(-0.25)).abs() < 1e-12);
        // self-reciprocal under the scaled Fourier transform: the momentum
        // samples match the same Gaussian profile on the dual grid
        let f = hbar_fourier(&phi, Direction::Forward);
        let mut d = 0.0f64;
        for (idx, v) in f.values().iter().enumerate() {
            let p = f.grid().coords(idx)[0];
            d = d.max((v - C64::new(PI.powf(-0.25) * (-p * p / 2.0).exp(), 0.0)).norm());
        }
        assert!(d < 1e-10);
    }

    #[test]
    fn hermite_zero_is_the_standard_gaussian() {
        let grid = ConfigGrid::new_1d(128, 10.0, 0.8).unwrap();
        let h0 = hermite_state(0, &grid).unwrap();
        let phi = standard_gaussian(&grid);
        let d: f64 = h0
            .values()
            .iter()
            .zip(phi.values())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()));
        assert!(d < 1e-12);
    }

    #[test]
    fn hermite_states_are_orthonormal() {
        let grid = ConfigGrid::new_1d(256, 16.0, 1.0).unwrap();
        let states: Vec<_> = (0..=6).map(|n| hermite_state(n, &grid).unwrap()).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let g = inner(a, b).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.re - want).abs() < 1e-10 && g.im.abs() < 1e-12, "({i},{j}): {g}");
            }
        }
    }

    #[test]
    fn gaussian_wigner_block_formula() {
        // X = I, Y = 0 -> G = I
        let p = GaussianParams::config(Mat::eye(1), Mat::zeros(1, 1), 1.0).unwrap();
        let g = gaussian_wigner(&p).unwrap();
        if let GaussianParams::Phase { g, .. } = g {
            assert!(g.sub(&Mat::eye(2)).norm_max() < 1e-12);
        } else {
            panic!("expected phase params");
        }
        // X = diag(2), Y = 0 -> G = diag(2, 1/2)
        let p = GaussianParams::config(Mat::diag(&[2.0]), Mat::zeros(1, 1), 1.0).unwrap();
        if let GaussianParams::Phase { g, .. } = gaussian_wigner(&p).unwrap() {
            assert!(g.sub(&Mat::diag(&[2.0, 0.5])).norm_max() < 1e-12);
        }
    }

    #[test]
    fn gaussian_wigner_is_symplectic_for_random_parameters() {
        let mut rng = Rng::new(19);
        for _ in 0..100 {
            let n = 1 + (rng.next_u64() % 2) as usize;
            let x = crate::symplectic::random_spd(&mut rng, n, 0.3, 3.0);
            let mut y = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = rng.range(-1.0, 1.0);
                    y[(i, j)] = v;
                    y[(j, i)] = v;
                }
            }
            let p = GaussianParams::config(x, y, 1.0).unwrap();
            // constructor certifies G ∈ Sp(N); reaching Phase is the assertion
            assert!(matches!(gaussian_wigner(&p).unwrap(), GaussianParams::Phase { .. }));
        }
    }

    #[test]
    fn quantum_state_examples() {
        let hbar = 1.0;
        let e = WignerEllipsoid::new(Mat::eye(2), hbar).unwrap();
        let (ok, ev) = quantum_state_check(&e).unwrap();
        assert!(ok);
        // eigenvalues of I + iJ are {0, 2}
        assert!(ev[0].abs() < 1e-12 && (ev[1] - 2.0).abs() < 1e-12);

        let e = WignerEllipsoid::new(Mat::eye(2).scale(2.0), hbar).unwrap();
        let (ok, ev) = quantum_state_check(&e).unwrap();
        assert!(!ok);
        assert!((ev[0] + 0.5).abs() < 1e-12);

        let e = WignerEllipsoid::new(Mat::diag(&[4.0, 1.0]), hbar).unwrap();
        let (ok, _) = quantum_state_check(&e).unwrap();
        assert!(!ok);
    }

    #[test]
    fn quantum_state_equivalences_on_random_ellipsoids() {
        let mut rng = Rng::new(23);
        let hbar = 0.9;
        for _ in 0..100 {
            let n = 1 + (rng.next_u64() % 2) as usize;
            let m = crate::symplectic::random_spd(&mut rng, 2 * n, 0.2, 2.5);
            let e = WignerEllipsoid::new(m, hbar).unwrap();
            let (a, _) = quantum_state_check(&e).unwrap();
            let (b, _) = uncertainty_check(&e.covariance(), hbar).unwrap();
            let c = capacity(&e).unwrap() >= PI * hbar * (1.0 - 1e-9);
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn purify_identity_and_n1() {
        let e = WignerEllipsoid::new(Mat::eye(2), 1.0).unwrap();
        if let GaussianParams::Phase { g, .. } = quantum_blob_purify(&e).unwrap() {
            assert!(g.sub(&Mat::eye(2)).norm_max() < 1e-10);
        }
        // N = 1: every capacity-πħ ellipsoid matrix is itself symplectic
        let m = Mat::diag(&[2.0, 0.5]);
        let e = WignerEllipsoid::new(m.clone(), 1.0).unwrap();
        if let GaussianParams::Phase { g, .. } = quantum_blob_purify(&e).unwrap() {
            assert!(g.sub(&m).norm_max() < 1e-9);
        }
    }

    #[test]
    fn purify_rejects_wrong_capacity() {
        let e = WignerEllipsoid::new(Mat::eye(2).scale(2.0), 1.0).unwrap();
        assert!(matches!(
            quantum_blob_purify(&e),
            Err(Error::CapacityNotHalfQuantum { .. })
        ));
    }

    #[test]
    fn purify_is_idempotent_on_symplectic_matrices() {
        let mut rng = Rng::new(31);
        for _ in 0..20 {
            let s = crate::symplectic::random_symplectic(&mut rng, 1, 0.4);
            let g = s.mat().t().mul(s.mat()).symmetrized(); // symplectic positive definite
            let e = WignerEllipsoid::new(g.clone(), 1.0).unwrap();
            if let GaussianParams::Phase { g: g2, .. } = quantum_blob_purify(&e).unwrap() {
                assert!(g2.sub(&g).norm_max() < 1e-8, "defect {}", g2.sub(&g).norm_max());
            }
        }
    }

    #[test]
    fn purify_degenerate_two_mode_instance() {
        // Williamson eigenvalues {1, 1}; swapping the two modes by the
        // symplectic permutation P must map G equivariantly: purify(PᵀMP) =
        // Pᵀ purify(M) P, which pins down the degenerate-eigenbasis freedom.
        let m = Mat::diag(&[1.0, 2.0, 1.0, 0.5]);
        let e = WignerEllipsoid::new(m.clone(), 1.0).unwrap();
        let g = match quantum_blob_purify(&e).unwrap() {
            GaussianParams::Phase { g, .. } => g,
            _ => unreachable!(),
        };
        assert!(is_symplectic(&g, 1e-8).unwrap());

        // P swaps (x1, x2) and (p1, p2)
        let mut p = Mat::zeros(4, 4);
        p[(0, 1)] = 1.0;
        p[(1, 0)] = 1.0;
        p[(2, 3)] = 1.0;
        p[(3, 2)] = 1.0;
        let mp = p.t().mul(&m).mul(&p).symmetrized();
        let ep = WignerEllipsoid::new(mp, 1.0).unwrap();
        let gp = match quantum_blob_purify(&ep).unwrap() {
            GaussianParams::Phase { g, .. } => g,
            _ => unreachable!(),
        };
        let want = p.t().mul(&g).mul(&p);
        assert!(gp.sub(&want).norm_max() < 1e-8, "defect {}", gp.sub(&want).norm_max());
    }
}
