//! Experiment configuration: JSON or flat `key = value` files, both
//! deserialized through the same schema with unknown keys rejected.

use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_extent")]
    pub extent: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

fn default_m() -> usize {
    256
}
fn default_extent() -> f64 {
    12.0
}
fn default_hbar() -> f64 {
    1.0
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { m: default_m(), extent: default_extent(), hbar: default_hbar() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    Gaussian,
    Hermite { n: usize },
    File { path: String },
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Gaussian
    }
}

/// Polynomial coefficients keyed `"1", "x", "p", "xx", "xp", "pp"`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyCoefficients {
    #[serde(rename = "1", default)]
    pub one: f64,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub xx: f64,
    #[serde(default)]
    pub xp: f64,
    #[serde(default)]
    pub pp: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Ho { omega: f64 },
    Poly { coefficients: PolyCoefficients },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSpec {
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_record")]
    pub record_every: usize,
}

fn default_method() -> String {
    "rk4-spectral".into()
}
fn default_record() -> usize {
    usize::MAX
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymplecticSpec {
    J,
    Rotation { theta: f64 },
    Matrix { rows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub state: StateSpec,
    #[serde(default)]
    pub window: StateSpec,
    #[serde(default)]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(default)]
    pub propagation: Option<PropagationSpec>,
    /// Row-major symmetric matrix for `gaussian-check`.
    #[serde(default)]
    pub gaussian_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub symplectic: Option<SymplecticSpec>,
    /// Decreasing ħ values for `hbar-sweep`.
    #[serde(default)]
    pub hbars: Option<Vec<f64>>,
    /// Evolution time for `ho-explicit`.
    #[serde(default)]
    pub time: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentConfig {
    /// Parse a config file: JSON when the first non-blank byte is `{`,
    /// flat `key = value` lines otherwise.
    pub fn parse(text: &str) -> CliResult<ExperimentConfig> {
        let trimmed = text.trim_start();
        let value: serde_json::Value = if trimmed.starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            kv_to_value(text)?
        };
        serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Convert flat `a.b.c = value` lines into a JSON tree. Values are parsed
/// as JSON scalars/arrays when possible and fall back to strings, so
/// `state.kind = hermite` and `hbars = [1.0, 0.25]` both work. Lines
/// starting with `#` are comments.
fn kv_to_value(text: &str) -> CliResult<serde_json::Value> {
    let mut root = serde_json::Map::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let parsed: serde_json::Value = match serde_json::from_str(value) {
            Ok(v) => v,
            Err(_) => serde_json::Value::String(value.trim_matches('"').to_string()),
        };
        let mut node = &mut root;
        let parts: Vec<&str> = key.split('.').collect();
        for part in &parts[..parts.len() - 1] {
            node = node
                .entry(part.to_string())
                .or_insert_with(|| serde_json::Value::Object(serde_json::Map::new()))
                .as_object_mut()
                .ok_or_else(|| CliError::Config(format!("key {key} nests into a scalar")))?;
        }
        node.insert(parts[parts.len() - 1].to_string(), parsed);
    }
    Ok(serde_json::Value::Object(root))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_json_and_rejects_unknown_keys() {
        let ok = r#"{"command": "wavepacket", "grid": {"m": 128, "extent": 10.0, "hbar": 0.5}}"#;
        let cfg = ExperimentConfig::parse(ok).unwrap();
        assert_eq!(cfg.command, "wavepacket");
        assert_eq!(cfg.grid.m, 128);

        let bad = r#"{"command": "wavepacket", "grdi": {}}"#;
        assert!(matches!(ExperimentConfig::parse(bad), Err(CliError::Config(_))));
    }

    #[test]
    fn parses_flat_key_value_format() {
        let text = "
# oscillator quarter period
command = propagate
grid.m = 128
grid.extent = 12.0
state.kind = hermite
state.n = 0
hamiltonian.kind = ho
hamiltonian.omega = 1.0
propagation.dt = 0.004
propagation.steps = 100
hbars = [1.0, 0.25]
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.command, "propagate");
        assert!(matches!(cfg.state, StateSpec::Hermite { n: 0 }));
        assert!(matches!(cfg.hamiltonian, Some(HamiltonianSpec::Ho { .. })));
        assert_eq!(cfg.hbars.as_deref(), Some(&[1.0, 0.25][..]));
        assert_eq!(cfg.propagation.unwrap().steps, 100);
    }

    #[test]
    fn flat_format_rejects_unknown_keys_too() {
        let text = "command = marginals\ngrid.points = 64\n";
        assert!(matches!(ExperimentConfig::parse(text), Err(CliError::Config(_))));
    }
}
