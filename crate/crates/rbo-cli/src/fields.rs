//! Versioned JSON on-disk format for real fields:
//! `{"format_version": 1, "grid": {"n", "half_length"}, "samples": [...]}`
//! with full-precision decimal floats, so a write/read round trip is
//! bit-identical on the sample values.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rbo_core::{Grid, RealField};

use crate::CliError;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    format_version: u64,
    grid: GridSpec,
    samples: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    n: usize,
    half_length: f64,
}

fn schema(path: &Path, detail: &str) -> CliError {
    CliError::Io(format!("{}: schema mismatch: {detail}", path.display()))
}

pub fn write_field(u: &RealField, path: &Path) -> Result<(), CliError> {
    if let Some(idx) = u.samples().iter().position(|v| !v.is_finite()) {
        return Err(CliError::Io(format!(
            "{}: refusing to write non-finite sample at index {idx}",
            path.display()
        )));
    }
    let doc = FieldFile {
        format_version: FORMAT_VERSION,
        grid: GridSpec { n: u.grid().len(), half_length: u.grid().half_length() },
        samples: u.samples().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Io(format!("encoding {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

pub fn read_field(path: &Path) -> Result<RealField, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Io(format!("{}: not valid JSON: {e}", path.display())))?;

    // Version gate first, so a future format fails with both versions named
    // instead of an opaque shape error.
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| schema(path, "missing integer `format_version`"))?;
    if found != FORMAT_VERSION {
        return Err(CliError::Io(format!(
            "{}: unsupported field-file version {found}; this tool reads version {FORMAT_VERSION}",
            path.display()
        )));
    }

    let doc: FieldFile =
        serde_json::from_value(value).map_err(|e| schema(path, &e.to_string()))?;
    let grid =
        Grid::new(doc.grid.n, doc.grid.half_length).map_err(|e| schema(path, &e.to_string()))?;
    if doc.samples.len() != doc.grid.n {
        return Err(schema(
            path,
            &format!("{} samples for a grid of {} points", doc.samples.len(), doc.grid.n),
        ));
    }
    if let Some(idx) = doc.samples.iter().position(|v| !v.is_finite()) {
        return Err(CliError::Io(format!(
            "{}: non-finite sample at index {idx}",
            path.display()
        )));
    }
    Ok(RealField::from_samples(grid, doc.samples))
}
