//! Zero-set file I/O. Two formats, both UTF-8:
//!
//! * CSV with header `re,im`, one zero per line, multiplicity by repetition;
//! * JSON array of `[re, im]` pairs.

use anyhow::{bail, Context, Result};
use canprod::{validate_sequence, ComplexPoint, ZeroSequence};
use std::path::Path;

/// Reads and validates a zero set from a `.csv` or `.json` file.
pub fn ingest_zeroset(path: &Path) -> Result<ZeroSequence> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let raw = match ext.as_str() {
        "json" => read_json(path)?,
        _ => read_csv(path)?,
    };
    validate_sequence(&raw).with_context(|| format!("validating zero set {}", path.display()))
}

fn read_csv(path: &Path) -> Result<Vec<ComplexPoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    {
        let headers = reader.headers().context("reading CSV header")?;
        if headers.len() < 2 || &headers[0] != "re" || &headers[1] != "im" {
            bail!(
                "{}: expected header `re,im`, found `{}`",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(",")
            );
        }
    }
    let mut zeros = Vec::new();
    for record in reader.records() {
        let record = record.context("reading CSV record")?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(zeros.len() as u64 + 2);
        if record.len() < 2 {
            bail!("{}: line {line}: expected two fields `re,im`", path.display());
        }
        let re: f64 = record[0]
            .parse()
            .with_context(|| format!("{}: line {line}: bad re field `{}`", path.display(), &record[0]))?;
        let im: f64 = record[1]
            .parse()
            .with_context(|| format!("{}: line {line}: bad im field `{}`", path.display(), &record[1]))?;
        zeros.push(ComplexPoint::new(re, im));
    }
    Ok(zeros)
}

fn read_json(path: &Path) -> Result<Vec<ComplexPoint>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let pairs: Vec<(f64, f64)> = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected a JSON array of [re, im] pairs", path.display()))?;
    Ok(pairs
        .into_iter()
        .map(|(re, im)| ComplexPoint::new(re, im))
        .collect())
}

/// Writes a zero set in the format matching the file extension.
pub fn write_zeroset(path: &Path, zs: &ZeroSequence) -> Result<()> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let mut body = String::new();
    if ext == "json" {
        body.push('[');
        for (i, z) in zs.zeros().iter().enumerate() {
            if i > 0 {
                body.push(',');
            }
            body.push_str(&format!("[{},{}]", z.re, z.im));
        }
        body.push_str("]\n");
    } else {
        body.push_str("re,im\n");
        for z in zs.zeros() {
            body.push_str(&format!("{},{}\n", z.re, z.im));
        }
    }
    crate::report::write_atomic(path, body.as_bytes())
}
