//! Batch experiment runner over the `psqm-core` library: schema-validated
//! configs in, machine-readable reports out (CSV, JSON manifests, binary
//! field files with JSON sidecars, gnuplot-ready `.dat` tables).

pub mod commands;
pub mod config;
pub mod io;
pub mod parallel;

/// Runner errors: configuration problems or propagated numerical errors.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Io(std::io::Error),
    Numeric(psqm_core::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Numeric(e) => write!(f, "numerical error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<psqm_core::Error> for CliError {
    fn from(e: psqm_core::Error) -> Self {
        CliError::Numeric(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
