//! Zero sequences, weight functions and the near-real partition.
//!
//! A [`ZeroSequence`] is a finite, validated list of nonzero complex zeros,
//! multiplicity encoded by repetition, sorted by nondecreasing modulus.
//! Zeros of equal modulus are ordered by principal argument and then by
//! occurrence, so that every construction in the crate is deterministic.

mod generate;
mod weight;

pub use generate::{clustered, condensed_cluster_lattice, integer_lattice, perturbed_lattice, ClusterSpec};
pub use weight::{check_weight, Weight, WeightReport, COND2_THRESHOLD, TREND_TOLERANCE};

use crate::point::ComplexPoint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("zero sequence must be nonempty")]
    EmptySequence,
    #[error("zero #{index} has a non-finite coordinate: {point}")]
    NonFinite { index: usize, point: ComplexPoint },
    #[error("zero #{index} lies at the origin; all zeros must have modulus > 0")]
    ContainsOrigin { index: usize },
    #[error("near-real zero #{index} has zero real part; projection would hit the origin")]
    ZeroRealPart { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("weight is not nondecreasing: l({t_lo}) = {l_lo} > l({t_hi}) = {l_hi}")]
    NonMonotoneWeight { t_lo: f64, l_lo: f64, t_hi: f64, l_hi: f64 },
    #[error("tabulated weight dips below 1 at t = {t}: l = {l}")]
    WeightBelowOne { t: f64, l: f64 },
    #[error("cluster windows [c-1, c+1] around centers {left} and {right} intersect")]
    ClusterOverlap { left: f64, right: f64 },
    #[error("spacing {spacing} * largest multiplicity {max_multiplicity} exceeds 2; cluster would not fit in its unit window")]
    SpacingTooWide { spacing: f64, max_multiplicity: usize },
    #[error("partition does not match the sequence (partition over {partition_len} zeros, sequence has {sequence_len})")]
    PartitionMismatch { partition_len: usize, sequence_len: usize },
}

/// Finite, validated zero sequence: all moduli positive, sorted by
/// nondecreasing modulus (ties by principal argument, then occurrence).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ComplexPoint>", into = "Vec<ComplexPoint>")]
pub struct ZeroSequence {
    zeros: Vec<ComplexPoint>,
}

impl ZeroSequence {
    pub fn zeros(&self) -> &[ComplexPoint] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        false // validation rejects empty input
    }

    /// Largest zero modulus; the radius up to which the sequence describes
    /// the zero set. Finite-range verdicts are only meaningful inside it.
    pub fn coverage_radius(&self) -> f64 {
        self.zeros.last().map(|z| z.modulus()).unwrap_or(0.0)
    }

    /// The sequence with every zero conjugated (re-validated, same moduli).
    pub fn conjugate(&self) -> ZeroSequence {
        let conj: Vec<ComplexPoint> = self.zeros.iter().map(|z| z.conj()).collect();
        validate_sequence(&conj).expect("conjugate of a valid sequence is valid")
    }
}

impl From<ZeroSequence> for Vec<ComplexPoint> {
    fn from(zs: ZeroSequence) -> Self {
        zs.zeros
    }
}

impl TryFrom<Vec<ComplexPoint>> for ZeroSequence {
    type Error = ModelError;
    fn try_from(raw: Vec<ComplexPoint>) -> Result<Self, ModelError> {
        validate_sequence(&raw)
    }
}

/// Validates a raw list of zeros and returns it sorted by modulus.
///
/// Rejects empty input, non-finite coordinates and zeros at the origin.
pub fn validate_sequence(raw: &[ComplexPoint]) -> Result<ZeroSequence, ModelError> {
    if raw.is_empty() {
        return Err(ModelError::EmptySequence);
    }
    for (index, z) in raw.iter().enumerate() {
        if !z.is_finite() {
            return Err(ModelError::NonFinite { index, point: *z });
        }
        if z.re == 0.0 && z.im == 0.0 {
            return Err(ModelError::ContainsOrigin { index });
        }
    }
    let mut zeros = raw.to_vec();
    zeros.sort_by(|a, b| {
        a.modulus()
            .total_cmp(&b.modulus())
            .then_with(|| a.argument().total_cmp(&b.argument()))
    });
    Ok(ZeroSequence { zeros })
}

/// Index split of a sequence into the near-real band M' (|Im| bounded by
/// `m0 * l(|Re|)`) and its complement M''.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearRealPartition {
    m0: f64,
    weight: Weight,
    m_prime: Vec<usize>,
    m_double_prime: Vec<usize>,
    membership: Vec<bool>,
}

impl NearRealPartition {
    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// Indices of near-real zeros, ascending.
    pub fn m_prime(&self) -> &[usize] {
        &self.m_prime
    }

    /// Indices of the complement, ascending.
    pub fn m_double_prime(&self) -> &[usize] {
        &self.m_double_prime
    }

    pub fn is_near_real(&self, index: usize) -> bool {
        self.membership[index]
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }
}

/// Splits `zs` by the exact membership test `|Im mu| <= m0 * l(|Re mu|)`.
pub fn partition_near_real(
    zs: &ZeroSequence,
    weight: &Weight,
    m0: f64,
) -> Result<NearRealPartition, ModelError> {
    if !(m0 > 0.0) || !m0.is_finite() {
        return Err(ModelError::InvalidParam(format!(
            "m0 must be positive and finite, got {m0}"
        )));
    }
    weight.validate()?;
    let mut m_prime = Vec::new();
    let mut m_double_prime = Vec::new();
    let mut membership = Vec::with_capacity(zs.len());
    for (k, z) in zs.zeros().iter().enumerate() {
        let near = z.im.abs() <= m0 * weight.eval(z.re.abs());
        membership.push(near);
        if near {
            m_prime.push(k);
        } else {
            m_double_prime.push(k);
        }
    }
    Ok(NearRealPartition {
        m0,
        weight: weight.clone(),
        m_prime,
        m_double_prime,
        membership,
    })
}

/// Replaces every near-real zero by its real part, keeps the rest, and
/// re-sorts by modulus. Errors if a near-real zero has zero real part.
pub fn project_real_parts(
    zs: &ZeroSequence,
    partition: &NearRealPartition,
) -> Result<ZeroSequence, ModelError> {
    if partition.len() != zs.len() {
        return Err(ModelError::PartitionMismatch {
            partition_len: partition.len(),
            sequence_len: zs.len(),
        });
    }
    let mut projected = Vec::with_capacity(zs.len());
    for (k, z) in zs.zeros().iter().enumerate() {
        if partition.is_near_real(k) {
            if z.re == 0.0 {
                return Err(ModelError::ZeroRealPart { index: k });
            }
            projected.push(ComplexPoint::real(z.re));
        } else {
            projected.push(*z);
        }
    }
    validate_sequence(&projected)
}
