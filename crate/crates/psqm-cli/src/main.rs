use std::path::PathBuf;
use std::process::ExitCode;

use psqm_cli::commands::{cmd_run, cmd_selftest, Overrides};
use psqm_cli::config::ExperimentConfig;
use psqm_cli::CliError;

const USAGE: &str = "\
psqm - phase-space quantum mechanics experiment runner

USAGE:
    psqm selftest [--seed N] [--out DIR]
    psqm run --config FILE [--out DIR] [--hbar V] [--grid M] [--seed N]

COMMANDS (config `command` field for `run`):
    wavepacket, propagate, ho-explicit, marginals,
    gaussian-check, metaplectic-covariance, hbar-sweep

Config files are JSON or flat `key = value` lines; unknown keys are
rejected. PSQM_THREADS caps internal parallelism.
";

struct Args {
    subcommand: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    hbar: Option<f64>,
    grid: Option<usize>,
    seed: Option<u64>,
}

fn parse_args(argv: &[String]) -> Result<Args, CliError> {
    if argv.is_empty() {
        return Err(CliError::Usage("missing subcommand".into()));
    }
    let mut args = Args {
        subcommand: argv[0].clone(),
        config: None,
        out: None,
        hbar: None,
        grid: None,
        seed: None,
    };
    let mut it = argv[1..].iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next().cloned().ok_or_else(|| CliError::Usage(format!("{name} needs a value")))
        };
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(value("--config")?)),
            "--out" => args.out = Some(PathBuf::from(value("--out")?)),
            "--hbar" => {
                args.hbar = Some(
                    value("--hbar")?
                        .parse()
                        .map_err(|_| CliError::Usage("--hbar expects a number".into()))?,
                )
            }
            "--grid" => {
                args.grid = Some(
                    value("--grid")?
                        .parse()
                        .map_err(|_| CliError::Usage("--grid expects an integer".into()))?,
                )
            }
            "--seed" => {
                args.seed = Some(
                    value("--seed")?
                        .parse()
                        .map_err(|_| CliError::Usage("--seed expects an integer".into()))?,
                )
            }
            other => return Err(CliError::Usage(format!("unknown flag `{other}`"))),
        }
    }
    Ok(args)
}

fn run() -> Result<i32, CliError> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if argv.iter().any(|a| a == "--help" || a == "-h") || argv.is_empty() {
        print!("{USAGE}");
        return Ok(if argv.is_empty() { 2 } else { 0 });
    }
    let args = parse_args(&argv)?;
    match args.subcommand.as_str() {
        "selftest" => cmd_selftest(args.seed.unwrap_or(1), args.out.as_deref()),
        "run" => {
            let path = args
                .config
                .ok_or_else(|| CliError::Usage("run needs --config".into()))?;
            let text = std::fs::read_to_string(&path)?;
            let cfg = ExperimentConfig::parse(&text)?;
            cmd_run(
                cfg,
                &Overrides { out: args.out, hbar: args.hbar, grid_m: args.grid, seed: args.seed },
            )
        }
        other => Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}\n\n{USAGE}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
