//! Fixture generators: the symmetric integer lattice, seeded near-real
//! perturbations of it, and real zero clusters merged into a background.

use super::{validate_sequence, ModelError, Weight, ZeroSequence};
use crate::point::ComplexPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Zeros `{+-1, ..., +-n}` of `sin(pi z) / (pi z)`.
pub fn integer_lattice(n: usize) -> Result<ZeroSequence, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidParam("lattice size n must be >= 1".into()));
    }
    let mut zeros = Vec::with_capacity(2 * n);
    for k in 1..=n {
        zeros.push(ComplexPoint::real(k as f64));
        zeros.push(ComplexPoint::real(-(k as f64)));
    }
    validate_sequence(&zeros)
}

/// Lattice zeros pushed off the axis: `k + i delta_k` with
/// `|delta_k| <= m0 * l(|k|)`, drawn uniformly and reproducibly from `seed`.
pub fn perturbed_lattice(
    n: usize,
    band: &Weight,
    m0: f64,
    seed: u64,
) -> Result<ZeroSequence, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidParam("lattice size n must be >= 1".into()));
    }
    if !(m0 > 0.0) || !m0.is_finite() {
        return Err(ModelError::InvalidParam(format!(
            "m0 must be positive and finite, got {m0}"
        )));
    }
    band.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut zeros = Vec::with_capacity(2 * n);
    for k in 1..=n {
        let bound = m0 * band.eval(k as f64);
        let delta_pos: f64 = rng.gen_range(-bound..=bound);
        let delta_neg: f64 = rng.gen_range(-bound..=bound);
        zeros.push(ComplexPoint::new(k as f64, delta_pos));
        zeros.push(ComplexPoint::new(-(k as f64), delta_neg));
    }
    validate_sequence(&zeros)
}

/// Real clusters: at each center `x_j` a block of `m_j` evenly spaced zeros,
/// optionally merged into a background sequence.
#[derive(Clone, Debug)]
pub struct ClusterSpec {
    /// Strictly increasing real cluster locations, all > 2.
    pub centers: Vec<f64>,
    /// One multiplicity per center, all >= 1.
    pub multiplicities: Vec<usize>,
    /// Zeros to merge with, if any.
    pub background: Option<ZeroSequence>,
}

impl ClusterSpec {
    fn validate(&self) -> Result<(), ModelError> {
        if self.centers.is_empty() || self.centers.len() != self.multiplicities.len() {
            return Err(ModelError::InvalidParam(
                "centers and multiplicities must be nonempty and of equal length".into(),
            ));
        }
        for &c in &self.centers {
            if !(c > 2.0) || !c.is_finite() {
                return Err(ModelError::InvalidParam(format!(
                    "cluster centers must be finite and > 2, got {c}"
                )));
            }
        }
        for w in self.centers.windows(2) {
            if !(w[1] > w[0]) {
                return Err(ModelError::InvalidParam(
                    "cluster centers must be strictly increasing".into(),
                ));
            }
            // Closed windows [c-1, c+1] must not share a point.
            if w[1] - w[0] <= 2.0 {
                return Err(ModelError::ClusterOverlap {
                    left: w[0],
                    right: w[1],
                });
            }
        }
        if self.multiplicities.iter().any(|&m| m == 0) {
            return Err(ModelError::InvalidParam("multiplicities must be >= 1".into()));
        }
        Ok(())
    }
}

/// Places each cluster's zeros with the given spacing, centered at its
/// center, merges with the background and re-validates.
///
/// Pre: `spacing * max(m_j) <= 2`, so every cluster fits in `[x_j-1, x_j+1]`.
pub fn clustered(spec: &ClusterSpec, spacing: f64) -> Result<ZeroSequence, ModelError> {
    spec.validate()?;
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(ModelError::InvalidParam(format!(
            "spacing must be positive and finite, got {spacing}"
        )));
    }
    let max_multiplicity = *spec.multiplicities.iter().max().unwrap();
    if spacing * max_multiplicity as f64 > 2.0 {
        return Err(ModelError::SpacingTooWide {
            spacing,
            max_multiplicity,
        });
    }
    let mut zeros: Vec<ComplexPoint> = spec
        .background
        .as_ref()
        .map(|b| b.zeros().to_vec())
        .unwrap_or_default();
    for (&center, &m) in spec.centers.iter().zip(&spec.multiplicities) {
        let half = spacing * (m as f64 - 1.0) / 2.0;
        for i in 0..m {
            zeros.push(ComplexPoint::real(center - half + spacing * i as f64));
        }
    }
    validate_sequence(&zeros)
}

/// Density-preserving cluster fixture: for each `j = 1..=max_j`, the
/// `j^2` lattice integers nearest `e^j` are removed from the `+-n` integer
/// lattice and re-placed as a cluster of `j^2` zeros with the given spacing
/// at `e^j`. Shell counts are preserved, so the growth envelope stays
/// lattice-like while the counting ratio at the centers grows like `j`.
///
/// Returns the sequence together with the cluster centers and
/// multiplicities. Pre: `n` large enough to contain the top block.
pub fn condensed_cluster_lattice(
    max_j: u32,
    n: usize,
    spacing: f64,
) -> Result<(ZeroSequence, Vec<f64>, Vec<usize>), ModelError> {
    if max_j == 0 {
        return Err(ModelError::InvalidParam("max_j must be >= 1".into()));
    }
    let centers: Vec<f64> = (1..=max_j).map(|j| (j as f64).exp()).collect();
    let multiplicities: Vec<usize> = (1..=max_j).map(|j| (j * j) as usize).collect();

    let mut removed: Vec<(i64, i64)> = Vec::new();
    for (&c, &m) in centers.iter().zip(&multiplicities) {
        let mid = c.round() as i64;
        let lo = mid - ((m as i64 - 1) / 2);
        let hi = lo + m as i64 - 1;
        if hi > n as i64 || lo < 1 {
            return Err(ModelError::InvalidParam(format!(
                "lattice size {n} cannot host the removed block [{lo}, {hi}] around {c}"
            )));
        }
        removed.push((lo, hi));
    }

    let lattice = integer_lattice(n)?;
    let background: Vec<ComplexPoint> = lattice
        .zeros()
        .iter()
        .filter(|z| {
            let k = z.re as i64;
            !(z.re > 0.0 && removed.iter().any(|&(lo, hi)| k >= lo && k <= hi))
        })
        .copied()
        .collect();
    let spec = ClusterSpec {
        centers: centers.clone(),
        multiplicities: multiplicities.clone(),
        background: Some(validate_sequence(&background)?),
    };
    Ok((clustered(&spec, spacing)?, centers, multiplicities))
}
