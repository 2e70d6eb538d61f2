//! File formats: little-endian binary fields with JSON sidecar headers,
//! CSV exports, matrices, and gnuplot-ready tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use psqm_core::grid::{Axis, ConfigField, ConfigGrid, PhaseField, PhaseGrid};

use crate::{CliError, CliResult};

fn axis_bounds(a: &Axis) -> [f64; 2] {
    [a.min, a.min + a.extent()]
}

fn write_raw(path: &Path, values: &[C64]) -> CliResult<()> {
    let mut buf = Vec::with_capacity(values.len() * 16);
    for v in values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

fn read_raw(path: &Path) -> CliResult<Vec<C64>> {
    let bytes = fs::read(path)?;
    if bytes.len() % 16 != 0 {
        return Err(CliError::Config(format!("{} is not interleaved f64 pairs", path.display())));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect())
}

/// Write `<base>.f64` (interleaved re/im doubles, little endian) and the
/// `<base>.json` sidecar `{shape, bounds, hbar}`.
pub fn write_config_field(base: &Path, field: &ConfigField) -> CliResult<()> {
    write_raw(&base.with_extension("f64"), field.values())?;
    let grid = field.grid();
    let sidecar = serde_json::json!({
        "shape": grid.axes().iter().map(|a| a.len).collect::<Vec<_>>(),
        "bounds": grid.axes().iter().map(axis_bounds).collect::<Vec<_>>(),
        "hbar": grid.hbar(),
    });
    fs::write(base.with_extension("json"), serde_json::to_string_pretty(&sidecar).unwrap())?;
    Ok(())
}

pub fn write_phase_field(base: &Path, field: &PhaseField) -> CliResult<()> {
    write_raw(&base.with_extension("f64"), field.values())?;
    let grid = field.grid();
    let sidecar = serde_json::json!({
        "shape": [grid.x.len, grid.p.len],
        "bounds": [axis_bounds(&grid.x), axis_bounds(&grid.p)],
        "hbar": grid.hbar(),
    });
    fs::write(base.with_extension("json"), serde_json::to_string_pretty(&sidecar).unwrap())?;
    Ok(())
}

/// Read a 1D configuration field written by [`write_config_field`].
pub fn read_config_field(base: &Path) -> CliResult<ConfigField> {
    #[derive(serde::Deserialize)]
    struct Sidecar {
        shape: Vec<usize>,
        bounds: Vec<[f64; 2]>,
        hbar: f64,
    }
    let sidecar: Sidecar =
        serde_json::from_str(&fs::read_to_string(base.with_extension("json"))?)
            .map_err(|e| CliError::Config(e.to_string()))?;
    if sidecar.shape.len() != 1 {
        return Err(CliError::Config("expected a 1D field".into()));
    }
    let extent = (sidecar.bounds[0][1] - sidecar.bounds[0][0]) / 2.0;
    let grid = ConfigGrid::new_1d(sidecar.shape[0], extent, sidecar.hbar)?;
    let values = read_raw(&base.with_extension("f64"))?;
    Ok(ConfigField::from_values(&grid, values)?)
}

pub fn write_config_field_csv(path: &Path, field: &ConfigField) -> CliResult<()> {
    let mut out = String::from("x,re,im\n");
    let grid = field.grid();
    for (idx, v) in field.values().iter().enumerate() {
        let c = grid.coords(idx);
        out.push_str(&format!("{:e},{:e},{:e}\n", c[0], v.re, v.im));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_phase_field_csv(path: &Path, field: &PhaseField) -> CliResult<()> {
    let mut out = String::from("x,p,re,im\n");
    let grid: &PhaseGrid = field.grid();
    for ix in 0..grid.x.len {
        for ip in 0..grid.p.len {
            let v = field.get(ix, ip);
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e}\n",
                grid.x.point(ix),
                grid.p.point(ip),
                v.re,
                v.im
            ));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Columns with a `#`-prefixed header, whitespace separated.
pub fn write_dat(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut out = format!("# {}\n", header.join(" "));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut out = format!("{}\n", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_manifest(dir: &Path, manifest: &serde_json::Value) -> CliResult<PathBuf> {
    let path = dir.join("manifest.json");
    let mut f = fs::File::create(&path)?;
    f.write_all(serde_json::to_string_pretty(manifest).unwrap().as_bytes())?;
    f.write_all(b"\n")?;
    Ok(path)
}
