//! Builtin zero-set fixtures and the spec syntax that names them.
//!
//! * `lattice:N` — integer lattice `{+-1..+-N}`;
//! * `perturbed:N` — lattice pushed off-axis inside the configured band
//!   (weight, `m0`, seed);
//! * `clusters:J` — the condensed-cluster family: at each `e^j`,
//!   `j = 1..=J`, the `j^2` nearest lattice integers are replaced by a
//!   cluster of `j^2` zeros with the configured spacing;
//! * `one-sided:N` — `{1..N}`, whose canonical product diverges;
//! * anything else — a CSV/JSON file path.

use crate::config::ExperimentConfig;
use crate::ingest::ingest_zeroset;
use anyhow::{bail, Context, Result};
use canprod::zero_model::{
    condensed_cluster_lattice, integer_lattice, perturbed_lattice, validate_sequence,
};
use canprod::{ComplexPoint, ZeroSequence};
use std::path::Path;

/// A loaded fixture plus whatever structure it declares.
pub struct LoadedZeros {
    pub zeros: ZeroSequence,
    /// Cluster centers, when the fixture has them.
    pub centers: Vec<f64>,
    /// Cluster multiplicities, parallel to `centers`.
    pub multiplicities: Vec<usize>,
    /// Echoed source spec.
    pub source: String,
}

pub fn load_zeros(cfg: &ExperimentConfig) -> Result<LoadedZeros> {
    load_spec(
        &cfg.zeros,
        cfg.seed,
        &cfg.weight,
        cfg.m0,
        cfg.cluster.spacing,
    )
}

pub fn load_spec(
    spec: &str,
    seed: u64,
    band: &canprod::Weight,
    m0: f64,
    spacing: f64,
) -> Result<LoadedZeros> {
    let mk = |zeros: ZeroSequence| LoadedZeros {
        zeros,
        centers: Vec::new(),
        multiplicities: Vec::new(),
        source: spec.to_string(),
    };
    if let Some(arg) = spec.strip_prefix("lattice:") {
        let n: usize = arg.parse().context("lattice:N needs an integer N")?;
        return Ok(mk(integer_lattice(n)?));
    }
    if let Some(arg) = spec.strip_prefix("perturbed:") {
        let n: usize = arg.parse().context("perturbed:N needs an integer N")?;
        return Ok(mk(perturbed_lattice(n, band, m0, seed)?));
    }
    if let Some(arg) = spec.strip_prefix("one-sided:") {
        let n: usize = arg.parse().context("one-sided:N needs an integer N")?;
        if n == 0 {
            bail!("one-sided:N needs N >= 1");
        }
        let zeros: Vec<ComplexPoint> = (1..=n).map(|k| ComplexPoint::real(k as f64)).collect();
        return Ok(mk(validate_sequence(&zeros)?));
    }
    if let Some(arg) = spec.strip_prefix("clusters:") {
        let max_j: u32 = arg.parse().context("clusters:J needs an integer J")?;
        // lattice sized so the top cluster and its probe windows stay well
        // inside the covered range
        let n = ((max_j as f64).exp() * 1.05).ceil() as usize + 64;
        let (zeros, centers, multiplicities) = condensed_cluster_lattice(max_j, n, spacing)?;
        return Ok(LoadedZeros {
            zeros,
            centers,
            multiplicities,
            source: spec.to_string(),
        });
    }
    Ok(mk(ingest_zeroset(Path::new(spec))?))
}
