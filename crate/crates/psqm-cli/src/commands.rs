//! The experiment commands. Each command builds its inputs from the
//! validated config, runs the corresponding library pipeline, and writes a
//! manifest (always embedding the conventions version) plus field files,
//! CSVs and gnuplot tables into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use psqm_core::gaussian::{hermite_state, standard_gaussian};
use psqm_core::grid::{inner_phase, ConfigField, ConfigGrid, PhaseGrid};
use psqm_core::linalg::Mat;
use psqm_core::measurement::{
    marginal_x_with_reference, marginal_p_with_reference, sweep_row, SweepRow,
};
use psqm_core::metaplectic::{tph_conjugation_residual, wigner_covariance_residual, MetaplecticData};
use psqm_core::propagator::{ho_explicit, propagate, Method, PropagationConfig};
use psqm_core::selftest::{results_to_json, run_selftest};
use psqm_core::symplectic::{ho_rotation, j_matrix, SymplecticMatrix};
use psqm_core::transforms::{range_residual, wavepacket, WavePacketWindow};
use psqm_core::weyl::{ho_operator, weyl_quantize_phase, PhaseOperator, PolySymbol, WeylSymbol};
use psqm_core::CONVENTIONS_VERSION;

use crate::config::{
    ExperimentConfig, HamiltonianSpec, PropagationSpec, StateSpec, SymplecticSpec,
};
use crate::io;
use crate::parallel::par_map;
use crate::{CliError, CliResult};

pub struct Overrides {
    pub out: Option<PathBuf>,
    pub hbar: Option<f64>,
    pub grid_m: Option<usize>,
    pub seed: Option<u64>,
}

/// Run the self-test suite, write the JSON summary, return the exit code.
pub fn cmd_selftest(seed: u64, out_dir: Option<&Path>) -> CliResult<i32> {
    let corrupt = std::env::var("PSQM_SELFTEST_CORRUPT").ok();
    let results = run_selftest(seed, corrupt.as_deref())?;
    let json = results_to_json(&results);
    println!("{json}");
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("selftest.json"), format!("{json}\n"))?;
    }
    let failures: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    if failures.is_empty() {
        Ok(0)
    } else {
        eprintln!("failed invariants: {}", failures.join(", "));
        Ok(1)
    }
}

/// Execute one configured experiment.
pub fn cmd_run(mut cfg: ExperimentConfig, ov: &Overrides) -> CliResult<i32> {
    if let Some(h) = ov.hbar {
        cfg.grid.hbar = h;
    }
    if let Some(m) = ov.grid_m {
        cfg.grid.m = m;
    }
    if let Some(s) = ov.seed {
        cfg.seed = Some(s);
    }
    let out_dir: PathBuf = ov
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::Usage("no output directory (--out or config `out`)".into()))?;
    fs::create_dir_all(&out_dir)?;

    match cfg.command.as_str() {
        "wavepacket" => cmd_wavepacket(&cfg, &out_dir),
        "propagate" => cmd_propagate(&cfg, &out_dir),
        "ho-explicit" => cmd_ho_explicit(&cfg, &out_dir),
        "marginals" => cmd_marginals(&cfg, &out_dir),
        "gaussian-check" => cmd_gaussian_check(&cfg, &out_dir),
        "metaplectic-covariance" => cmd_metaplectic(&cfg, &out_dir),
        "hbar-sweep" => cmd_hbar_sweep(&cfg, &out_dir),
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

fn build_grid(cfg: &ExperimentConfig) -> CliResult<ConfigGrid> {
    Ok(ConfigGrid::new_1d(cfg.grid.m, cfg.grid.extent, cfg.grid.hbar)?)
}

fn build_state(spec: &StateSpec, grid: &ConfigGrid) -> CliResult<ConfigField> {
    match spec {
        StateSpec::Gaussian => Ok(standard_gaussian(grid)),
        StateSpec::Hermite { n } => Ok(hermite_state(*n, grid)?),
        StateSpec::File { path } => {
            let field = io::read_config_field(Path::new(path))?;
            if !field.grid().approx_eq(grid) {
                return Err(CliError::Config(format!(
                    "field in {path} does not match the configured grid"
                )));
            }
            Ok(field)
        }
    }
}

fn build_window(cfg: &ExperimentConfig, grid: &ConfigGrid) -> CliResult<WavePacketWindow> {
    Ok(WavePacketWindow::new(&build_state(&cfg.window, grid)?)?)
}

fn build_hamiltonian(spec: &HamiltonianSpec) -> (PolySymbol, f64) {
    match spec {
        HamiltonianSpec::Ho { omega } => (PolySymbol::harmonic(*omega), *omega),
        HamiltonianSpec::Poly { coefficients } => (
            PolySymbol {
                c0: coefficients.one,
                cx: coefficients.x,
                cp: coefficients.p,
                cxx: coefficients.xx,
                cxp: coefficients.xp,
                cpp: coefficients.pp,
            },
            f64::NAN,
        ),
    }
}

fn build_operator(spec: &HamiltonianSpec) -> PhaseOperator {
    match spec {
        HamiltonianSpec::Ho { omega } => ho_operator(*omega),
        HamiltonianSpec::Poly { .. } => {
            let (sym, _) = build_hamiltonian(spec);
            // polynomial stencils are grid-independent
            weyl_quantize_phase(&WeylSymbol::Poly(sym), &PhaseGrid::standard(2, 1.0, 1.0).unwrap())
                .expect("polynomial stencil")
        }
    }
}

fn build_symplectic(spec: &SymplecticSpec) -> CliResult<SymplecticMatrix> {
    let mat = match spec {
        SymplecticSpec::J => j_matrix(1),
        SymplecticSpec::Rotation { theta } => return Ok(ho_rotation(*theta)),
        SymplecticSpec::Matrix { rows } => {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(CliError::Config("symplectic matrix must be square".into()));
            }
            Mat::from_fn(n, n, |i, j| rows[i][j])
        }
    };
    Ok(SymplecticMatrix::new(mat)?)
}

fn base_manifest(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::json!({
        "conventions": CONVENTIONS_VERSION,
        "command": cfg.command,
        "grid": {"m": cfg.grid.m, "extent": cfg.grid.extent, "hbar": cfg.grid.hbar},
        "seed": cfg.seed.unwrap_or(0),
    })
}

fn cmd_wavepacket(cfg: &ExperimentConfig, out: &Path) -> CliResult<i32> {
    let grid = build_grid(cfg)?;
    let window = build_window(cfg, &grid)?;
    let psi = build_state(&cfg.state, &grid)?;
    let field = wavepacket(&window, &psi)?;
    io::write_phase_field(&out.join("field"), &field)?;
    io::write_phase_field_csv(&out.join("field.csv"), &field)?;
    let mut manifest = base_manifest(cfg);
    manifest["norm_in"] = psi.norm().into();
    manifest["norm_out"] = field.norm().into();
    manifest["range_residual"] = range_residual(&window, &field)?.into();
    io::write_manifest(out, &manifest)?;
    Ok(0)
}

fn parse_method(spec: &PropagationSpec) -> CliResult<Method> {
    match spec.method.as_str() {
        "rk4-spectral" => Ok(Method::Rk4Spectral),
        "dense-kernel-expm" => Ok(Method::DenseKernelExpm),
        other => Err(CliError::Config(format!("unknown method `{other}`"))),
    }
}

fn cmd_propagate(cfg: &ExperimentConfig, out: &Path) -> CliResult<i32> {
    let grid = build_grid(cfg)?;
    let window = build_window(cfg, &grid)?;
    let psi = build_state(&cfg.state, &grid)?;
    let field = wavepacket(&window, &psi)?;
    let ham = cfg
        .hamiltonian
        .as_ref()
        .ok_or_else(|| CliError::Config("propagate needs a hamiltonian".into()))?;
    let prop = cfg
        .propagation
        .as_ref()
        .ok_or_else(|| CliError::Config("propagate needs a propagation block".into()))?;
    let op = build_operator(ham);
    let pc = PropagationConfig {
        dt: prop.dt,
        steps: prop.steps,
        method: parse_method(prop)?,
        record_every: prop.record_every,
    };
    let traj = propagate(&op, &field, &pc)?;

    let norm0 = field.norm();
    let mut overlaps_re = Vec::new();
    let mut overlaps_im = Vec::new();
    for state in &traj.states {
        let c = inner_phase(state, &field)? / field.norm_sq();
        overlaps_re.push(c.re);
        overlaps_im.push(c.im);
    }
    let drift = traj.norms.iter().fold(0.0f64, |m, &n| m.max((n - norm0).abs()));

    // stationary-phase diagnostic for oscillator eigenstate inputs
    let phase_error = match (&cfg.state, ham) {
        (StateSpec::Hermite { n }, HamiltonianSpec::Ho { omega }) => {
            let mut worst = 0.0f64;
            for (k, &t) in traj.times.iter().enumerate() {
                let expect =
                    C64::new(0.0, -omega * t * (*n as f64 + 0.5) / grid.hbar()).exp();
                let got = C64::new(overlaps_re[k], overlaps_im[k]);
                worst = worst.max((got - expect).norm());
            }
            Some(worst)
        }
        _ => None,
    };

    for (k, state) in traj.states.iter().enumerate() {
        io::write_phase_field(&out.join(format!("state_{k:04}")), state)?;
    }
    let mut manifest = base_manifest(cfg);
    manifest["times"] = serde_json::json!(traj.times);
    manifest["norms"] = serde_json::json!(traj.norms);
    manifest["energies"] = serde_json::json!(traj.energies);
    manifest["overlap_re"] = serde_json::json!(overlaps_re);
    manifest["overlap_im"] = serde_json::json!(overlaps_im);
    manifest["norm_drift"] = drift.into();
    if let Some(p) = phase_error {
        manifest["phase_error"] = p.into();
    }
    io::write_manifest(out, &manifest)?;
    Ok(0)
}

fn cmd_ho_explicit(cfg: &ExperimentConfig, out: &Path) -> CliResult<i32> {
    let grid = build_grid(cfg)?;
    let window = build_window(cfg, &grid)?;
    let psi = build_state(&cfg.state, &grid)?;
    let field = wavepacket(&window, &psi)?;
    let omega = match cfg.hamiltonian {
        Some(HamiltonianSpec::Ho { omega }) => omega,
        _ => return Err(CliError::Config("ho-explicit needs hamiltonian.kind = ho".into())),
    };
    let t = cfg.time.ok_or_else(|| CliError::Config("ho-explicit needs `time`".into()))?;
    let explicit = ho_explicit(omega, t, &field)?;

    // cross-check against the spectral stepper
    let steps = ((t.abs() * 400.0).ceil() as usize).max(100);
    let pc = PropagationConfig {
        dt: t / steps as f64,
        steps,
        method: Method::Rk4Spectral,
        record_every: steps,
    };
    let traj = propagate(&ho_operator(omega), &field, &pc)?;
    let stepped = traj.states.last().unwrap();
    let residual = explicit.sub(stepped)?.norm() / field.norm();

    io::write_phase_field(&out.join("explicit"), &explicit)?;
    let mut manifest = base_manifest(cfg);
    manifest["time"] = t.into();
    manifest["omega"] = omega.into();
    manifest["solver_residual"] = residual.into();
    manifest["norm_out"] = explicit.norm().into();
    io::write_manifest(out, &manifest)?;
    Ok(0)
}

fn cmd_marginals(cfg: &ExperimentConfig, out: &Path) -> CliResult<i32> {
    let grid = build_grid(cfg)?;
    let window = build_window(cfg, &grid)?;
    let psi = build_state(&cfg.state, &grid)?;

    let mx = marginal_x_with_reference(&window, &psi)?;
    let mp = marginal_p_with_reference(&window, &psi)?;
    for (name, report) in [("marginal_x", &mx), ("marginal_p", &mp)] {
        let reference = report.reference.as_ref().unwrap();
        let rows: Vec<Vec<f64>> = report
            .axis
            .iter()
            .zip(&report.density)
            .zip(reference)
            .map(|((&a, &d), &r)| vec![a, d, r, (d - r).abs()])
            .collect();
        io::write_csv(&out.join(format!("{name}.csv")), &["axis", "density", "reference", "abs_error"], &rows)?;
        io::write_dat(&out.join(format!("{name}.dat")), &["axis", "density", "reference"], &rows)?;
    }
    let mut manifest = base_manifest(cfg);
    manifest["sup_error_x"] = mx.sup_error.unwrap().into();
    manifest["sup_error_p"] = mp.sup_error.unwrap().into();
    manifest["total_mass_x"] = mx.total_mass.into();
    manifest["total_mass_p"] = mp.total_mass.into();
    io::write_manifest(out, &manifest)?;
    Ok(0)
}

fn cmd_gaussian_check(cfg: &ExperimentConfig, out: &Path) -> CliResult<i32> {
    let grid = build_grid(cfg)?;
    let window = build_window(cfg, &grid)?;
    let rows = cfg
        .gaussian_matrix
        .as_ref()
        .ok_or_else(|| CliError::Config("gaussian-check needs `gaussian_matrix`".into()))?;
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(CliError::Config("gaussian_matrix must be 2x2".into()));
    }
    let g = Mat::from_fn(2, 2, |i, j| rows[i][j]);
    let report = psqm_core::gaussian::phase_gaussian_range_check(&g, &window)?;
    let mut manifest = base_manifest(cfg);
    manifest["residual"] = report.residual.into();
    manifest["symplectic_g"] = report.symplectic_g.into();
    manifest["symplectic_2g"] = report.symplectic_2g.into();
    manifest["rescaled"] = serde_json::json!([
        [report.rescaled[(0, 0)], report.rescaled[(0, 1)]],
        [report.rescaled[(1, 0)], report.rescaled[(1, 1)]],
    ]);
    io::write_manifest(out, &manifest)?;
    Ok(0)
}

fn cmd_metaplectic(cfg: &ExperimentConfig, out: &Path) -> CliResult<i32> {
    let grid = build_grid(cfg)?;
    let window = build_window(cfg, &grid)?;
    let psi = build_state(&cfg.state, &grid)?;
    let spec = cfg
        .symplectic
        .as_ref()
        .ok_or_else(|| CliError::Config("metaplectic-covariance needs `symplectic`".into()))?;
    let s = build_symplectic(spec)?;
    let phi = window.field().clone();
    let wigner_res = wigner_covariance_residual(&s, &psi, &phi)?;

    let mut manifest = base_manifest(cfg);
    manifest["wigner_covariance_residual"] = wigner_res.into();

    // conjugation diagnostic when the superposition form exists
    let data = MetaplecticData::new(s, None);
    if data.cayley().is_some() && data.nu().is_some() {
        let field = wavepacket(&window, &psi)?;
        let pg = field.grid().clone();
        let z0 = [3.0 * pg.x.step, -2.0 * pg.p.step];
        manifest["tph_conjugation_residual"] =
            tph_conjugation_residual(&data, z0, &field)?.into();
    }
    io::write_manifest(out, &manifest)?;
    Ok(0)
}

fn cmd_hbar_sweep(cfg: &ExperimentConfig, out: &Path) -> CliResult<i32> {
    let hbars = cfg
        .hbars
        .as_ref()
        .ok_or_else(|| CliError::Config("hbar-sweep needs `hbars`".into()))?;
    if hbars.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Config("`hbars` must be strictly decreasing".into()));
    }
    let m = cfg.grid.m;
    // embarrassingly parallel across ħ values
    let rows: Vec<psqm_core::Result<SweepRow>> = par_map(hbars, |&h| sweep_row(h, m, 1.0));
    let mut table = Vec::new();
    for r in rows {
        let r = r?;
        table.push(vec![r.hbar, r.sup_x, r.sup_p]);
    }
    let monotone = table.windows(2).all(|w| w[1][1] < w[0][1] && w[1][2] < w[0][2]);
    io::write_csv(&out.join("sweep.csv"), &["hbar", "sup_error_x", "sup_error_p"], &table)?;
    io::write_dat(&out.join("sweep.dat"), &["hbar", "sup_error_x", "sup_error_p"], &table)?;
    let mut manifest = base_manifest(cfg);
    manifest["monotone"] = monotone.into();
    manifest["rows"] = serde_json::json!(table);
    io::write_manifest(out, &manifest)?;
    Ok(if monotone { 0 } else { 1 })
}
