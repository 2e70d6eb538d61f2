//! Named invariant suite behind the `selftest` command: every core
//! identity measured at default sizes with its gate threshold, reported as
//! structured results so the runner can emit a machine-readable summary.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

use crate::gaussian::{hermite_state, random_state, standard_gaussian};
use crate::grid::{inner, inner_phase, ConfigGrid, PhaseField, PhaseGrid};
use crate::linalg::Mat;
use crate::measurement::marginal_x_with_reference;
use crate::metaplectic::{mehlig_wilkinson_config, quadratic_fourier, MetaplecticData};
use crate::propagator::{hj_residual, LinearHamiltonian};
use crate::rng::Rng;
use crate::symplectic::{
    capacity, ho_rotation, random_spd, symplectic_cayley, symplectic_form, uncertainty_check,
    williamson, WignerEllipsoid,
};
use crate::transforms::{
    cr_residual, range_residual, symplectic_fourier, wavepacket, wavepacket_adjoint,
    WavePacketWindow,
};
use crate::weyl::{hw_config, hw_phase, weyl_quantize_config, PolySymbol, WeylSymbol};
use crate::Result;

/// Measured residual of one named invariant.
#[derive(Debug, Clone)]
pub struct InvariantResult {
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn finish(name: &'static str, residual: f64, threshold: f64, corrupt: Option<&str>) -> InvariantResult {
    let residual = if corrupt == Some(name) { residual.max(1e-300) * 1e9 + 1.0 } else { residual };
    InvariantResult { name, residual, threshold, pass: residual < threshold }
}

/// Run the full suite. `corrupt` inflates the named residual (test hook for
/// exercising the failure path of the runner).
pub fn run_selftest(seed: u64, corrupt: Option<&str>) -> Result<Vec<InvariantResult>> {
    let hbar = 1.0;
    let grid = ConfigGrid::new_1d(128, 12.0, hbar)?;
    let window = WavePacketWindow::new(&standard_gaussian(&grid))?;
    let mut rng = Rng::new(seed);
    let mut out = Vec::new();

    // parseval: ((U_φψ, U_φψ')) = (ψ, ψ')
    {
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let a = random_state(&grid, 6, &mut rng)?;
            let b = random_state(&grid, 6, &mut rng)?;
            let lhs = inner_phase(&wavepacket(&window, &a)?, &wavepacket(&window, &b)?)?;
            worst = worst.max((lhs - inner(&a, &b)?).norm());
        }
        out.push(finish("parseval", worst, 1e-8, corrupt));
    }

    // isometry: U*U = I
    {
        let psi = random_state(&grid, 8, &mut rng)?;
        let back = wavepacket_adjoint(&window, &wavepacket(&window, &psi)?)?;
        out.push(finish("isometry", back.sub(&psi)?.norm(), 1e-8, corrupt));
    }

    // intertwining: (x/2 + iħ∂_p)U_φψ = U_φ(xψ) and the momentum twin
    {
        let i = C64::new(0.0, 1.0);
        let mut worst = 0.0f64;
        for n in 0..3 {
            let psi = hermite_state(n, &grid)?;
            let u = wavepacket(&window, &psi)?;
            let lhs_x = u
                .mul_fn(|x, _| C64::new(0.5 * x, 0.0))
                .add(&u.spectral_derivative(1).scaled(i * hbar))?;
            let rhs_x = wavepacket(&window, &psi.mul_coord(|c| c[0]))?;
            worst = worst.max(lhs_x.sub(&rhs_x)?.norm());
            let lhs_p = u
                .mul_fn(|_, p| C64::new(0.5 * p, 0.0))
                .add(&u.spectral_derivative(0).scaled(-i * hbar))?;
            let dpsi = crate::grid::spectral_derivative(&psi, 0)?.scaled(-i * hbar);
            let rhs_p = wavepacket(&window, &dpsi)?;
            worst = worst.max(lhs_p.sub(&rhs_p)?.norm());
        }
        out.push(finish("intertwining", worst, 1e-7, corrupt));
    }

    // hw_commutation / hw_composition phases on phase space
    {
        let pg = PhaseGrid::from_config(&grid)?;
        let psi = PhaseField::from_fn(&pg, |x, p| {
            C64::new((-(x * x + p * p) / 2.0).exp(), 0.3 * (-(x * x + p * p) / 2.5).exp())
        });
        let scale = psi.max_abs();
        let z0 = [1.0, 0.0];
        let z1 = [0.0, 1.0];
        let ab = hw_phase(z1, 0.0, &hw_phase(z0, 0.0, &psi));
        let ba = hw_phase(z0, 0.0, &hw_phase(z1, 0.0, &psi));
        // z₀∧z₁ = -1: T(z₁)T(z₀) = e^{+i} T(z₀)T(z₁)
        let mut comm = 0.0f64;
        for (u, v) in ab.values().iter().zip(ba.values()) {
            comm = comm.max((u - v * C64::new(1.0f64.cos(), 1.0f64.sin())).norm());
        }
        out.push(finish("hw_commutation", comm / scale, 1e-10, corrupt));

        let sum = hw_phase([1.0, 1.0], 0.0, &psi);
        let mut comp = 0.0f64;
        for (u, v) in ba.values().iter().zip(sum.values()) {
            comp = comp.max((u - v * C64::new((-0.5f64).cos(), (-0.5f64).sin())).norm());
        }
        out.push(finish("hw_composition", comp / scale, 1e-10, corrupt));
    }

    // representation: T_ph(z₀) U_φ = U_φ T_Sch(z₀) on lattice points
    {
        let pg = window.phase_grid();
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let psi = random_state(&grid, 5, &mut rng)?;
            let z0 = [
                pg.x.step * ((rng.next_u64() % 13) as f64 - 6.0),
                pg.p.step * ((rng.next_u64() % 13) as f64 - 6.0),
            ];
            let lhs = hw_phase([z0[0], z0[1]], 0.0, &wavepacket(&window, &psi)?);
            let rhs = wavepacket(&window, &hw_config(&z0, 0.0, &psi)?)?;
            worst = worst.max(lhs.sub(&rhs)?.norm());
        }
        out.push(finish("representation", worst, 1e-7, corrupt));
    }

    // ho_eigen: Rayleigh quotients on wave-packet images of Hermite states
    {
        let omega = 1.0;
        let op = crate::weyl::ho_operator(omega);
        let mut worst = 0.0f64;
        for n in 0..3 {
            let u = wavepacket(&window, &hermite_state(n, &grid)?)?;
            let want = hbar * omega * (n as f64 + 0.5);
            let got = inner_phase(&op.apply(&u)?, &u)?.re / u.norm_sq();
            worst = worst.max(((got - want) / want).abs());
        }
        out.push(finish("ho_eigen", worst, 1e-6, corrupt));
    }

    // marginal_convolution: position marginal vs |φ|² ∗ |ψ|²
    {
        let psi = random_state(&grid, 4, &mut rng)?;
        let report = marginal_x_with_reference(&window, &psi)?;
        out.push(finish("marginal_convolution", report.sup_error.unwrap_or(f64::NAN), 1e-8, corrupt));
    }

    // sf_involution: F_σ² = I
    {
        let pg = PhaseGrid::standard(64, 10.0, hbar)?;
        let f = PhaseField::from_fn(&pg, |x, p| {
            C64::new((-(x * x + p * p) / 3.0).exp(), 0.2 * (-(x * x + p * p) / 2.0).exp())
        });
        let ff = symplectic_fourier(&symplectic_fourier(&f)?)?;
        out.push(finish("sf_involution", ff.sub(&f)?.max_abs(), 1e-10, corrupt));
    }

    // williamson reconstruction on random positive matrices
    {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let n = 1 + (rng.next_u64() % 2) as usize;
            let m = random_spd(&mut rng, 2 * n, 0.2, 4.0);
            let (s, l) = williamson(&m)?;
            let mut d = alloc::vec![0.0; 2 * n];
            for i in 0..n {
                d[i] = l[i];
                d[n + i] = l[i];
            }
            worst = worst.max(s.mat().t().mul(&Mat::diag(&d)).mul(s.mat()).sub(&m).norm_max());
        }
        out.push(finish("williamson", worst, 1e-9, corrupt));
    }

    // capacity invariance under symplectic congruence
    {
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let m = random_spd(&mut rng, 4, 0.3, 3.0);
            let s = crate::symplectic::random_symplectic(&mut rng, 2, 0.4);
            let m2 = s.mat().t().mul(&m).mul(s.mat()).symmetrized();
            let c1 = capacity(&WignerEllipsoid::new(m.clone(), hbar)?)?;
            let c2 = capacity(&WignerEllipsoid::new(m2, hbar)?)?;
            worst = worst.max(((c1 - c2) / c1).abs());
        }
        out.push(finish("capacity_invariance", worst, 1e-9, corrupt));
    }

    // uncertainty_equivalence: three quantum-state criteria agree
    {
        let mut disagreements = 0usize;
        for _ in 0..50 {
            let n = 1 + (rng.next_u64() % 2) as usize;
            let m = random_spd(&mut rng, 2 * n, 0.2, 2.5);
            let e = WignerEllipsoid::new(m, hbar)?;
            let (a, _) = crate::gaussian::quantum_state_check(&e)?;
            let (b, _) = uncertainty_check(&e.covariance(), hbar)?;
            let c = capacity(&e)? >= PI * hbar * (1.0 - 1e-9);
            if a != b || a != c {
                disagreements += 1;
            }
        }
        out.push(finish("uncertainty_equivalence", disagreements as f64, 0.5, corrupt));
    }

    // range_characterization: projector and annihilation verdicts agree
    {
        let pg = window.phase_grid();
        let members = [
            PhaseField::from_fn(&pg, |x, p| C64::new((-(x * x + p * p) / (4.0 * hbar)).exp(), 0.0)),
            PhaseField::from_fn(&pg, |x, p| {
                C64::new(x, -p) * ((-(x * x + p * p)) / (4.0 * hbar)).exp()
            }),
        ];
        let outsiders = [
            PhaseField::from_fn(&pg, |x, p| C64::new((-(x * x + p * p) / (8.0 * hbar)).exp(), 0.0)),
            PhaseField::from_fn(&pg, |x, p| {
                C64::new(x, p) * ((-(x * x + p * p)) / (4.0 * hbar)).exp()
            }),
        ];
        let mut worst = 0.0f64;
        for f in &members {
            worst = worst.max(range_residual(&window, f)?);
            worst = worst.max(cr_residual(f, None)?);
        }
        // outsiders must be flagged by both routes: treat shortfall from
        // the 0.1 rejection threshold as the residual
        for f in &outsiders {
            worst = worst.max((0.1 - range_residual(&window, f)?).max(0.0));
            worst = worst.max((0.1 - cr_residual(f, None)?).max(0.0));
        }
        out.push(finish("range_characterization", worst, 1e-7, corrupt));
    }

    // cayley_identity: M_S z·z = (S - I)⁻¹ z ∧ z
    {
        let s = ho_rotation(1.1);
        let ms = symplectic_cayley(&s)?;
        let inv = s.mat().sub(&Mat::eye(2)).inverse().unwrap();
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let z = [rng.normal(), rng.normal()];
            let msz = ms.matvec(&z);
            let lhs: f64 = z.iter().zip(&msz).map(|(a, b)| a * b).sum();
            let rhs = symplectic_form(&inv.matvec(&z), &z)?;
            worst = worst.max((lhs - rhs).abs());
        }
        out.push(finish("cayley_identity", worst, 1e-9, corrupt));
    }

    // metaplectic_quarter: superposition vs quadratic Fourier at ωt = π/2
    {
        let h0 = hermite_state(0, &grid)?;
        let data = MetaplecticData::new(ho_rotation(PI / 2.0), None);
        let mw = mehlig_wilkinson_config(&data, &h0)?;
        let qf = quadratic_fourier(&data, &h0)?;
        out.push(finish("metaplectic_quarter", mw.sub(&qf)?.norm() / qf.norm(), 1e-5, corrupt));
    }

    // hamilton_jacobi: symmetrized residual of the closed-form phase
    {
        let h = LinearHamiltonian::new_1d(1.0, 2.0);
        let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..20)
            .map(|_| {
                (alloc::vec![rng.range(-5.0, 5.0)], alloc::vec![rng.range(-5.0, 5.0)])
            })
            .collect();
        let res = hj_residual(&h, &[0.0, 0.7, -1.3], &samples);
        out.push(finish("hamilton_jacobi", res, 1e-10, corrupt));
    }

    // quantization rules: A = x and A = p act canonically
    {
        let psi = random_state(&grid, 4, &mut rng)?;
        let xo = weyl_quantize_config(&WeylSymbol::Poly(PolySymbol::position()), &psi)?;
        let want = psi.mul_coord(|c| c[0]);
        let mut worst = xo.sub(&want)?.norm();
        let po = weyl_quantize_config(&WeylSymbol::Poly(PolySymbol::momentum()), &psi)?;
        let dpsi = crate::grid::spectral_derivative(&psi, 0)?.scaled(C64::new(0.0, -hbar));
        worst = worst.max(po.sub(&dpsi)?.norm());
        out.push(finish("quantization_rules", worst, 1e-9, corrupt));
    }

    Ok(out)
}

/// Render results as a deterministic JSON object keyed by invariant name.
pub fn results_to_json(results: &[InvariantResult]) -> String {
    use core::fmt::Write;
    let mut s = String::from("{\n");
    for (i, r) in results.iter().enumerate() {
        let comma = if i + 1 == results.len() { "" } else { "," };
        let _ = write!(
            s,
            "  \"{}\": {{\"residual\": {:e}, \"threshold\": {:e}, \"pass\": {}}}{}\n",
            r.name, r.residual, r.threshold, r.pass, comma
        );
    }
    s.push('}');
    s
}
