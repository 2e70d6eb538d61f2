//! Time evolution of the phase-space equation `iħ ∂_t Ψ = Ĥ_ph Ψ`.
//!
//! Two integrators: an explicit RK4 stepper with spectral operator
//! application (production path, with a pre-flight stability estimate by
//! power iteration), and a dense matrix-exponential oracle on small grids
//! (Krylov evaluation of `e^{-itH/ħ}` on the materialized operator).
//! The explicit harmonic-oscillator propagator and the closed-form
//! linear-Hamiltonian flow complete the module.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::grid::{ConfigField, Direction, PhaseField};
use crate::linalg::{sym_eigen, Mat};
use crate::metaplectic::MetaplecticData;
use crate::rng::Rng;
use crate::symplectic::ho_rotation;
use crate::weyl::PhaseOperator;
use crate::Result;

/// RK4 imaginary-axis stability bound `|λ| dt ≤ 2√2`, with a safety margin.
const RK4_STABILITY: f64 = 2.0 * core::f64::consts::SQRT_2 * 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Explicit fourth-order Runge-Kutta with spectral operator application.
    Rk4Spectral,
    /// Dense materialization + Krylov matrix exponential (small grids).
    DenseKernelExpm,
}

#[derive(Debug, Clone)]
pub struct PropagationConfig {
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
    /// A snapshot is recorded every `record_every` steps (the initial and
    /// final states are always recorded).
    pub record_every: usize,
}

/// Recorded trajectory: snapshots with their times, norms and energies
/// (Rayleigh quotients of the Hamiltonian).
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseField>,
    pub norms: Vec<f64>,
    pub energies: Vec<f64>,
}

/// Power-iteration estimate of the spectral radius of a Hermitian phase
/// operator.
pub fn spectral_radius_estimate(
    op: &PhaseOperator,
    grid: &crate::grid::PhaseGrid,
    iters: usize,
) -> Result<f64> {
    let mut rng = Rng::new(0x5eed);
    let mut v = PhaseField::zeros(grid);
    for x in v.values_mut().iter_mut() {
        *x = rng.complex_normal();
    }
    let mut rho = 0.0;
    for _ in 0..iters.max(8) {
        let n = v.norm();
        if !(n > 0.0) {
            return Ok(0.0);
        }
        v = v.scaled(C64::new(1.0 / n, 0.0));
        v = op.apply(&v)?;
        rho = v.norm();
    }
    Ok(rho)
}

fn record(
    traj: &mut Trajectory,
    op: &PhaseOperator,
    state: &PhaseField,
    t: f64,
) -> Result<()> {
    let ns = state.norm_sq();
    let h = op.apply(state)?;
    let e = crate::grid::inner_phase(&h, state)?.re / ns.max(1e-300);
    traj.times.push(t);
    traj.norms.push(ns.sqrt());
    traj.energies.push(e);
    traj.states.push(state.clone());
    Ok(())
}

/// Integrate `iħ ∂_t Ψ = Ĥ Ψ` for a Hermitian operator.
///
/// The RK4 path checks `dt · ρ(Ĥ)/ħ` against the imaginary-axis stability
/// bound before stepping and reports the estimate in the error when
/// violated. The dense path materializes the operator (grids up to the
/// dense cap) and applies the exact exponential between snapshots.
pub fn propagate(
    op: &PhaseOperator,
    psi0: &PhaseField,
    cfg: &PropagationConfig,
) -> Result<Trajectory> {
    if !op.is_hermitian() {
        return Err(Error::NotSymmetric(f64::NAN));
    }
    let grid = psi0.grid().clone();
    let hbar = grid.hbar();
    let every = cfg.record_every.max(1);
    let mut traj =
        Trajectory { times: Vec::new(), states: Vec::new(), norms: Vec::new(), energies: Vec::new() };

    match cfg.method {
        Method::Rk4Spectral => {
            let rho = spectral_radius_estimate(op, &grid, 30)?;
            let dt_rho = cfg.dt * rho / hbar;
            if dt_rho >= RK4_STABILITY {
                return Err(Error::StabilityViolation { dt_rho, bound: RK4_STABILITY });
            }
            let minus_i_over_h = C64::new(0.0, -1.0 / hbar);
            let mut psi = psi0.clone();
            record(&mut traj, op, &psi, 0.0)?;
            for step in 0..cfg.steps {
                let k1 = op.apply(&psi)?.scaled(minus_i_over_h);
                let k2 = op
                    .apply(&psi.add(&k1.scaled(C64::new(cfg.dt / 2.0, 0.0)))?)?
                    .scaled(minus_i_over_h);
                let k3 = op
                    .apply(&psi.add(&k2.scaled(C64::new(cfg.dt / 2.0, 0.0)))?)?
                    .scaled(minus_i_over_h);
                let k4 = op.apply(&psi.add(&k3.scaled(C64::new(cfg.dt, 0.0)))?)?
                    .scaled(minus_i_over_h);
                let incr = k1
                    .add(&k2.scaled(C64::new(2.0, 0.0)))?
                    .add(&k3.scaled(C64::new(2.0, 0.0)))?
                    .add(&k4)?
                    .scaled(C64::new(cfg.dt / 6.0, 0.0));
                psi = psi.add(&incr)?;
                if (step + 1) % every == 0 || step + 1 == cfg.steps {
                    record(&mut traj, op, &psi, (step + 1) as f64 * cfg.dt)?;
                }
            }
        }
        Method::DenseKernelExpm => {
            let mat = op.to_dense_matrix(&grid)?;
            let n = grid.len();
            let mut psi = psi0.values().to_vec();
            record(&mut traj, op, psi0, 0.0)?;
            let mut done = 0usize;
            while done < cfg.steps {
                let chunk = every.min(cfg.steps - done);
                let tau = chunk as f64 * cfg.dt / hbar;
                psi = expm_multiply_hermitian(&mat, n, &psi, tau)?;
                done += chunk;
                let state = PhaseField::from_values(&grid, psi.clone())?;
                record(&mut traj, op, &state, done as f64 * cfg.dt)?;
            }
        }
    }
    Ok(traj)
}

/// Krylov (Lanczos) evaluation of `e^{-iτ H} v` for a dense Hermitian `H`,
/// with full reorthogonalization and adaptive time splitting.
pub(crate) fn expm_multiply_hermitian(
    mat: &[C64],
    n: usize,
    v: &[C64],
    tau: f64,
) -> Result<Vec<C64>> {
    const KMAX: usize = 48;
    const TOL: f64 = 1e-12;

    let matvec = |x: &[C64], out: &mut Vec<C64>| {
        out.clear();
        for i in 0..n {
            let row = &mat[i * n..(i + 1) * n];
            let mut acc = C64::new(0.0, 0.0);
            for (m, xv) in row.iter().zip(x) {
                acc += m * xv;
            }
            out.push(acc);
        }
    };

    let mut state = v.to_vec();
    let mut remaining = tau;
    let mut chunk = tau;
    let mut guard = 0usize;
    while remaining.abs() > 1e-300 {
        guard += 1;
        if guard > 4096 {
            return Err(Error::KrylovStall);
        }
        let step = if chunk.abs() > remaining.abs() { remaining } else { chunk };
        match lanczos_exp_step(&matvec, n, &state, step, KMAX, TOL)? {
            Some(next) => {
                state = next;
                remaining -= step;
            }
            None => {
                chunk = step / 2.0;
                if chunk.abs() < 1e-12 * tau.abs().max(1e-300) {
                    return Err(Error::KrylovStall);
                }
            }
        }
    }
    Ok(state)
}

/// One Krylov step; `None` when the iteration cap was hit without meeting
/// the tolerance (caller halves the step).
fn lanczos_exp_step(
    matvec: &impl Fn(&[C64], &mut Vec<C64>),
    n: usize,
    v: &[C64],
    tau: f64,
    kmax: usize,
    tol: f64,
) -> Result<Option<Vec<C64>>> {
    let beta0: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if beta0 < 1e-300 {
        return Ok(Some(v.to_vec()));
    }
    let mut basis: Vec<Vec<C64>> = vec![v.iter().map(|z| z / beta0).collect()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w: Vec<C64> = Vec::with_capacity(n);

    for k in 0..kmax {
        matvec(&basis[k], &mut w);
        // full reorthogonalization keeps the small spectral problem honest
        for b in &basis {
            let c: C64 = b.iter().zip(w.iter()).map(|(bi, wi)| bi.conj() * wi).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
            if b.as_ptr() == basis[k].as_ptr() {
                alphas.push(c.re);
            }
        }
        let beta: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        // tridiagonal exponential in the Krylov basis
        let k1 = k + 1;
        let mut t = Mat::zeros(k1, k1);
        for i in 0..k1 {
            t[(i, i)] = alphas[i];
            if i + 1 < k1 {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let (evals, evecs) = sym_eigen(&t);
        // exp(-iτT) e₁
        let mut coeff = vec![C64::new(0.0, 0.0); k1];
        for (j, lam) in evals.iter().enumerate() {
            let phase = C64::new(0.0, -tau * lam).exp();
            let q1j = evecs[(0, j)];
            for (i, slot) in coeff.iter_mut().enumerate() {
                *slot += evecs[(i, j)] * q1j * phase;
            }
        }
        let err = beta * coeff[k1 - 1].norm() * tau.abs().max(1.0);
        if err < tol * beta0.max(1.0) || beta < 1e-13 {
            let mut out = vec![C64::new(0.0, 0.0); n];
            for (ci, b) in coeff.iter().zip(&basis) {
                let c = ci * beta0;
                for (o, bi) in out.iter_mut().zip(b) {
                    *o += c * bi;
                }
            }
            return Ok(Some(out));
        }
        betas.push(beta);
        basis.push(w.iter().map(|z| z / beta).collect());
    }
    Ok(None)
}

/// Explicit harmonic-oscillator propagator on phase space: the chirp-weighted
/// Heisenberg-Weyl superposition of the rotation `S_t` with the branch table
/// `ν = 0` for `0 < ωt < 2π` and `ν = -2` for `-2π < ωt < 0`.
///
/// Times with `|sin(ωt/2)| ≤ 1e-3` are rejected as near-singular; longer
/// evolutions are composed from safe factors.
pub fn ho_explicit(omega: f64, t: f64, psi0: &PhaseField) -> Result<PhaseField> {
    let wt = omega * t;
    if wt.abs() >= 2.0 * core::f64::consts::PI {
        return Err(Error::NearSingularTime(0.0));
    }
    let s = (wt / 2.0).sin();
    if s.abs() <= 1e-3 {
        return Err(Error::NearSingularTime(s.abs()));
    }
    let nu = if wt > 0.0 { 0 } else { -2 };
    let data = MetaplecticData::new(ho_rotation(wt), None).with_nu(nu);
    crate::metaplectic::mehlig_wilkinson_phase(&data, psi0)
}

/// Linear Hamiltonian `H₀ = p·r₀ - p₀·r`, whose flow translates phase
/// space along `(r₀, p₀)`.
#[derive(Debug, Clone)]
pub struct LinearHamiltonian {
    pub r0: Vec<f64>,
    pub p0: Vec<f64>,
}

impl LinearHamiltonian {
    pub fn new_1d(r0: f64, p0: f64) -> LinearHamiltonian {
        LinearHamiltonian { r0: vec![r0], p0: vec![p0] }
    }

    /// Symmetrized action phase `Φ½(r, p; t) = (t/2)(p₀·r - r₀·p)`, the
    /// unique sign for which the symmetrized Hamilton-Jacobi equation and
    /// the phase-space Schrödinger equation hold simultaneously.
    pub fn phase(&self, r: &[f64], p: &[f64], t: f64) -> f64 {
        let a: f64 = self.p0.iter().zip(r).map(|(a, b)| a * b).sum();
        let b: f64 = self.r0.iter().zip(p).map(|(a, b)| a * b).sum();
        0.5 * t * (a - b)
    }
}

/// Closed-form flow of the linear Hamiltonian:
/// `Ψ(z, t) = e^{(i/ħ)Φ½(z;t)} Ψ₀(z - t(r₀, p₀))` (spectral shift).
pub fn linear_flow(h: &LinearHamiltonian, t: f64, psi0: &PhaseField) -> Result<PhaseField> {
    if h.r0.len() != 1 || h.p0.len() != 1 {
        return Err(Error::UnsupportedDimension { max_dof: 1, got: h.r0.len() });
    }
    let hbar = psi0.grid().hbar();
    let shifted = psi0.translate(t * h.r0[0], t * h.p0[0]);
    Ok(shifted.mul_fn(|x, p| {
        let phi = h.phase(&[x], &[p], t);
        C64::new(0.0, phi / hbar).exp()
    }))
}

/// Residual of the symmetrized Hamilton-Jacobi equation
/// `∂_tΦ½ + H₀(r/2 + ∇_pΦ½, p/2 - ∇_rΦ½) = 0` for the closed-form phase,
/// maximized over the given times and phase-space samples. Vanishes
/// identically for the implemented sign convention.
pub fn hj_residual(h: &LinearHamiltonian, times: &[f64], samples: &[(Vec<f64>, Vec<f64>)]) -> f64 {
    let n = h.r0.len();
    let mut worst = 0.0f64;
    for &t in times {
        for (r, p) in samples {
            // ∂_tΦ = ½(p₀·r - r₀·p); ∇_rΦ = (t/2)p₀; ∇_pΦ = -(t/2)r₀
            let dt_phi = 0.5
                * (h.p0.iter().zip(r).map(|(a, b)| a * b).sum::<f64>()
                    - h.r0.iter().zip(p).map(|(a, b)| a * b).sum::<f64>());
            let mut h0 = 0.0;
            for i in 0..n {
                let a_i = 0.5 * r[i] - 0.5 * t * h.r0[i];
                let b_i = 0.5 * p[i] - 0.5 * t * h.p0[i];
                h0 += b_i * h.r0[i] - h.p0[i] * a_i;
            }
            worst = worst.max((dt_phi + h0).abs());
        }
    }
    worst
}

/// Strang split-step reference integrator on configuration space for
/// `H = T(p) + V(x)`, with the potential and kinetic profiles sampled on
/// the grid and its dual.
pub fn split_step_config(
    psi0: &ConfigField,
    potential: &[f64],
    kinetic_dual: &[f64],
    dt: f64,
    steps: usize,
) -> Result<ConfigField> {
    let grid = psi0.grid().clone();
    if potential.len() != grid.len() || kinetic_dual.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: potential.len() });
    }
    let hbar = grid.hbar();
    let half_v: Vec<C64> =
        potential.iter().map(|&v| C64::new(0.0, -0.5 * dt * v / hbar).exp()).collect();
    let full_t: Vec<C64> =
        kinetic_dual.iter().map(|&v| C64::new(0.0, -dt * v / hbar).exp()).collect();
    let mut psi = psi0.clone();
    for _ in 0..steps {
        for (v, m) in psi.values_mut().iter_mut().zip(&half_v) {
            *v *= m;
        }
        let mut mom = crate::grid::hbar_fourier(&psi, Direction::Forward);
        for (v, m) in mom.values_mut().iter_mut().zip(&full_t) {
            *v *= m;
        }
        psi = crate::grid::hbar_fourier(&mom, Direction::Inverse);
        for (v, m) in psi.values_mut().iter_mut().zip(&half_v) {
            *v *= m;
        }
    }
    Ok(psi)
}
