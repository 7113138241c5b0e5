//! Report writing: one JSON document per run plus CSV sidecars, all written
//! atomically (write-then-rename) with deterministic content.
//!
//! The JSON splits into a reproducible payload (config echo, thresholds,
//! results, verdict) and a `runtime` block (timestamp, wall time, version)
//! that is excluded from reproducibility comparisons.

use anyhow::{Context, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub config: serde_json::Value,
    /// Every numeric threshold that shaped a verdict in this run.
    pub thresholds: serde_json::Value,
    pub results: serde_json::Value,
    pub verdict: String,
    /// Excluded from byte-identity comparisons.
    pub runtime: Runtime,
}

#[derive(Serialize)]
pub struct Runtime {
    pub timestamp_unix: u64,
    pub wall_ms: u128,
    pub version: &'static str,
}

impl Runtime {
    pub fn new(wall_ms: u128) -> Self {
        Runtime {
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            wall_ms,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Writes `bytes` to `path` via a temporary sibling file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("output");
    let tmp: PathBuf = dir.join(format!(".{file_name}.tmp"));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming into place: {}", path.display()))?;
    Ok(())
}

pub fn write_report(dir: &Path, report: &Report) -> Result<PathBuf> {
    let path = dir.join("report.json");
    let mut body = serde_json::to_string_pretty(report).context("serializing report")?;
    body.push('\n');
    write_atomic(&path, body.as_bytes())?;
    Ok(path)
}

/// A deterministic CSV table: header plus preformatted rows.
pub struct Table {
    pub name: &'static str,
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl Table {
    pub fn new(name: &'static str, header: &'static str) -> Self {
        Table {
            name,
            header,
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, row: String) {
        self.rows.push(row);
    }
}

/// Writes each table as `<name>.csv` under `dir`, rows in insertion order.
pub fn emit_plotdata(dir: &Path, tables: &[Table]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(tables.len());
    for t in tables {
        let mut body = String::with_capacity(t.header.len() + 1 + t.rows.len() * 24);
        body.push_str(t.header);
        body.push('\n');
        for r in &t.rows {
            body.push_str(r);
            body.push('\n');
        }
        let path = dir.join(format!("{}.csv", t.name));
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Formats a float for CSV/JSON-adjacent output: shortest round-trip form,
/// with non-finite values spelled out.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}
