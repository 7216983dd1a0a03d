//! CSV tables and JSON run sidecars. Column orders are frozen contracts:
//! `converge-gamma` emits `gamma,m,dist_h12,residual,iterations` and
//! `stability` emits `t,orbital_distance,shift,E_drift,V_drift`. Floats are
//! printed in shortest round-trip form, so identical runs produce identical
//! bytes.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Resolved;
use crate::CliError;

pub const STABILITY_HEADER: &str = "t,orbital_distance,shift,E_drift,V_drift";
pub const GAMMA_HEADER: &str = "gamma,m,dist_h12,residual,iterations";
pub const SERIES_HEADER: &str = "t,E,V";

pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = String::with_capacity(header.len() + 1 + 24 * rows.len());
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    wall_clock_seconds: f64,
    config: Vec<ConfigEcho<'a>>,
    results: &'a Value,
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    key: &'static str,
    value: &'a str,
    source: &'static str,
}

/// Write the run's JSON sidecar: tool identity, the resolved configuration
/// with per-key provenance, wall-clock time, and command-specific results.
pub fn write_sidecar(
    path: &Path,
    command: &str,
    resolved: &Resolved,
    wall_clock_seconds: f64,
    results: &Value,
) -> Result<(), CliError> {
    let doc = Sidecar {
        tool: "rbo",
        version: env!("CARGO_PKG_VERSION"),
        command,
        wall_clock_seconds,
        config: resolved
            .entries
            .iter()
            .map(|(key, value, source)| ConfigEcho { key, value, source: source.label() })
            .collect(),
        results,
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Io(format!("encoding {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}
