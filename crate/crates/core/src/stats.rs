//! Counting statistics of real parts of near-real zeros.
//!
//! `m_re(x, r)` counts near-real zeros whose real part lies in the closed
//! segment `[x - r, x + r]` (endpoints included, multiplicity by
//! repetition). The bounded/unbounded verdict compares the ratio
//! `m_re(x, 1) / l(|x|)` against the weight as `|x|` grows: the limsup
//! statement is replaced by the fitted log-log slope of the running maximum
//! of the ratio over the last two decades of the probed range.

use crate::invertibility::log_probes;
use crate::zero_model::{NearRealPartition, Weight, ZeroSequence};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default trend-slope threshold for the bounded verdict.
pub const DEFAULT_THRESHOLD_SLOPE: f64 = 0.05;
/// The unbounded verdict needs the slope to exceed this multiple of the
/// threshold over at least [`MIN_DECADES`] decades.
pub const UNBOUNDED_FACTOR: f64 = 3.0;
pub const MIN_DECADES: f64 = 2.0;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("partition covers {partition_len} zeros, sequence has {sequence_len}")]
    PartitionMismatch { partition_len: usize, sequence_len: usize },
    #[error("range [{x_min}, {x_max}] exceeds the usable radius {usable} (coverage minus 1)")]
    RangeBeyondCoverage { x_min: f64, x_max: f64, usable: f64 },
}

/// Counting profile along probe centers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatioProfile {
    pub xs: Vec<f64>,
    /// `m_re(x, 1)` per probe.
    pub counts: Vec<usize>,
    /// `l(|x|)` per probe.
    pub weights: Vec<f64>,
    /// counts / weights, element-wise.
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    /// Fitted log-log slope of the running maximum of the ratio over the
    /// last two decades of |x| (0 when there is not enough signal).
    pub trend_slope: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem1Verdict {
    Bounded,
    UnboundedTrend,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub verdict: Theorem1Verdict,
    pub profile: RatioProfile,
    pub threshold_slope: f64,
    pub range: (f64, f64),
    /// Decades of |x| actually probed.
    pub decades: f64,
}

/// Sorted real parts of the near-real zeros, the reusable core of all
/// counting queries.
fn sorted_alphas(partition: &NearRealPartition, zs: &ZeroSequence) -> Vec<f64> {
    let mut alphas: Vec<f64> = partition
        .m_prime()
        .iter()
        .map(|&k| zs.zeros()[k].re)
        .collect();
    alphas.sort_by(f64::total_cmp);
    alphas
}

fn count_segment(alphas: &[f64], x: f64, r: f64) -> usize {
    let lo = alphas.partition_point(|&a| a < x - r);
    let hi = alphas.partition_point(|&a| a <= x + r);
    hi - lo
}

/// Number of near-real zeros with real part in `[x - r, x + r]` (closed,
/// multiplicity by repetition). Pre: `r > 0`.
pub fn m_re(
    partition: &NearRealPartition,
    zs: &ZeroSequence,
    x: f64,
    r: f64,
) -> Result<usize, StatsError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(StatsError::InvalidParam(format!(
            "segment radius must be positive, got {r}"
        )));
    }
    if partition.len() != zs.len() {
        return Err(StatsError::PartitionMismatch {
            partition_len: partition.len(),
            sequence_len: zs.len(),
        });
    }
    Ok(count_segment(&sorted_alphas(partition, zs), x, r))
}

/// Element-wise counts `m_re(x, 1)`, weights, ratios and the running-max
/// trend over the given probe centers.
pub fn ratio_profile(
    partition: &NearRealPartition,
    zs: &ZeroSequence,
    weight: &Weight,
    xs: &[f64],
) -> Result<RatioProfile, StatsError> {
    if partition.len() != zs.len() {
        return Err(StatsError::PartitionMismatch {
            partition_len: partition.len(),
            sequence_len: zs.len(),
        });
    }
    let alphas = sorted_alphas(partition, zs);
    let mut xs = xs.to_vec();
    xs.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let counts: Vec<usize> = xs.iter().map(|&x| count_segment(&alphas, x, 1.0)).collect();
    let weights: Vec<f64> = xs.iter().map(|&x| weight.eval(x.abs())).collect();
    let ratios: Vec<f64> = counts
        .iter()
        .zip(&weights)
        .map(|(&c, &w)| c as f64 / w)
        .collect();
    let sup_ratio = ratios.iter().copied().fold(0.0f64, f64::max);

    // Running maximum over |x|; the trend is fitted on the running max
    // resampled uniformly in ln|x| over the last two decades, so probe
    // placement density cannot bias the slope.
    let mut running = Vec::with_capacity(ratios.len());
    let mut m = 0.0f64;
    for &r in &ratios {
        m = m.max(r);
        running.push(m);
    }
    let x_hi = xs.last().map(|x| x.abs()).unwrap_or(0.0);
    let t_lo = (x_hi / 100.0).max(xs.first().map(|x| x.abs()).unwrap_or(0.0));
    let trend_slope = if x_hi > t_lo && t_lo > 0.0 && running.last().copied().unwrap_or(0.0) > 0.0 {
        let samples = 128;
        let mut pts = Vec::with_capacity(samples + 1);
        for i in 0..=samples {
            let t = t_lo.ln() + (x_hi.ln() - t_lo.ln()) * i as f64 / samples as f64;
            let x = t.exp();
            // running max at the largest probe with |probe| <= x
            let idx = xs.partition_point(|p| p.abs() <= x * (1.0 + 1e-12));
            if idx == 0 {
                continue;
            }
            let rm = running[idx - 1];
            if rm > 0.0 {
                pts.push((t, rm.ln()));
            }
        }
        ols_slope(&pts)
    } else {
        0.0
    };

    Ok(RatioProfile {
        xs,
        counts,
        weights,
        ratios,
        sup_ratio,
        trend_slope,
    })
}

/// Bounded/unbounded verdict for the counting ratio over `range`.
///
/// Probes are log-spaced across the range united with every distinct
/// near-real real part inside it, so concentration spikes cannot fall
/// between probes. Pre: the range stays at least 1 inside the coverage
/// radius, so no count is a truncation artifact.
pub fn theorem1_check(
    partition: &NearRealPartition,
    zs: &ZeroSequence,
    weight: &Weight,
    range: (f64, f64),
    threshold_slope: f64,
) -> Result<Theorem1Report, StatsError> {
    let (x_min, x_max) = range;
    if !(x_min > 0.0 && x_max > x_min) {
        return Err(StatsError::InvalidParam(format!(
            "range must satisfy 0 < x_min < x_max, got [{x_min}, {x_max}]"
        )));
    }
    if !(threshold_slope > 0.0) {
        return Err(StatsError::InvalidParam(
            "threshold slope must be positive".into(),
        ));
    }
    let usable = zs.coverage_radius() - 1.0;
    if x_max > usable {
        return Err(StatsError::RangeBeyondCoverage {
            x_min,
            x_max,
            usable,
        });
    }

    let mut xs = log_probes(x_min, x_max, 128);
    for &k in partition.m_prime() {
        let a = zs.zeros()[k].re;
        if a >= x_min && a <= x_max {
            xs.push(a);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let profile = ratio_profile(partition, zs, weight, &xs)?;
    let decades = (x_max / x_min).log10();
    let verdict = if profile.trend_slope <= threshold_slope {
        Theorem1Verdict::Bounded
    } else if profile.trend_slope > UNBOUNDED_FACTOR * threshold_slope && decades >= MIN_DECADES {
        Theorem1Verdict::UnboundedTrend
    } else {
        Theorem1Verdict::Inconclusive
    };
    Ok(Theorem1Report {
        verdict,
        profile,
        threshold_slope,
        range,
        decades,
    })
}

fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::ComplexPoint;
    use crate::zero_model::{
        clustered, condensed_cluster_lattice, integer_lattice, partition_near_real,
        validate_sequence, ClusterSpec, Weight,
    };
    use proptest::prelude::*;

    fn lattice_setup(n: usize) -> (ZeroSequence, NearRealPartition, Weight) {
        let zs = integer_lattice(n).unwrap();
        let w = Weight::Log { c: 1.0 };
        let p = partition_near_real(&zs, &w, 1.0).unwrap();
        (zs, p, w)
    }

    #[test]
    fn m_re_counts_closed_segments() {
        let (zs, p, _) = lattice_setup(1000);
        assert_eq!(m_re(&p, &zs, 10.3, 1.0).unwrap(), 2); // 10, 11
        assert_eq!(m_re(&p, &zs, 10.0, 1.0).unwrap(), 3); // 9, 10, 11 inclusive
        assert_eq!(m_re(&p, &zs, 0.0, 1.0).unwrap(), 2); // -1, 1
        assert!(m_re(&p, &zs, 1.0, 0.0).is_err());
    }

    #[test]
    fn m_re_counts_cluster_multiplicity() {
        let spec = ClusterSpec {
            centers: vec![50.0],
            multiplicities: vec![9],
            background: None,
        };
        let zs = clustered(&spec, 0.1).unwrap();
        let w = Weight::Log { c: 1.0 };
        let p = partition_near_real(&zs, &w, 1.0).unwrap();
        assert_eq!(m_re(&p, &zs, 50.0, 1.0).unwrap(), 9);
    }

    #[test]
    fn lattice_profile_is_bounded() {
        let (zs, p, w) = lattice_setup(10_001);
        let report = theorem1_check(&p, &zs, &w, (std::f64::consts::E, 1e4), 0.05).unwrap();
        assert_eq!(report.verdict, Theorem1Verdict::Bounded);
        // counts are 2 or 3; the sup lands at x = 3 with ratio 3 / ln 5
        let analytic = 3.0 / 5f64.ln();
        assert!(report.profile.sup_ratio <= 2.0);
        assert!((report.profile.sup_ratio - analytic).abs() < 1e-9);
        assert!(report.profile.trend_slope.abs() < 0.05);
    }

    #[test]
    fn cluster_profile_has_unbounded_trend() {
        let (zs, _, _) = condensed_cluster_lattice(9, 8300, 0.02).unwrap();
        let w = Weight::Log { c: 1.0 };
        let p = partition_near_real(&zs, &w, 1.0).unwrap();
        let report = theorem1_check(&p, &zs, &w, (std::f64::consts::E, 8250.0), 0.05).unwrap();
        assert_eq!(
            report.verdict,
            Theorem1Verdict::UnboundedTrend,
            "slope {}",
            report.profile.trend_slope
        );
        // the ratio at the top center is j^2 / ln(2 + e^j) ~ j = 9
        assert!((report.profile.sup_ratio - 9.0).abs() < 0.1);
    }

    #[test]
    fn empty_near_real_set_gives_zero_profile() {
        let zeros: Vec<ComplexPoint> =
            (1..=50).map(|k| ComplexPoint::new(k as f64, 1e6)).collect();
        let zs = validate_sequence(&zeros).unwrap();
        let w = Weight::Log { c: 1.0 };
        let p = partition_near_real(&zs, &w, 1.0).unwrap();
        assert!(p.m_prime().is_empty());
        let profile = ratio_profile(&p, &zs, &w, &log_probes(2.0, 40.0, 16)).unwrap();
        assert_eq!(profile.sup_ratio, 0.0);
        assert!(profile.counts.iter().all(|&c| c == 0));
        assert_eq!(profile.trend_slope, 0.0);
    }

    #[test]
    fn range_beyond_coverage_is_rejected() {
        let (zs, p, w) = lattice_setup(100);
        assert!(matches!(
            theorem1_check(&p, &zs, &w, (2.0, 99.5), 0.05),
            Err(StatsError::RangeBeyondCoverage { .. })
        ));
    }

    proptest! {
        #[test]
        fn m_re_matches_brute_force(
            xs in prop::collection::vec(-120.0f64..120.0, 1..20),
            r in 0.25f64..4.0,
        ) {
            let (zs, p, _) = lattice_setup(100);
            for &x in &xs {
                let fast = m_re(&p, &zs, x, r).unwrap();
                let brute = p
                    .m_prime()
                    .iter()
                    .filter(|&&k| {
                        let a = zs.zeros()[k].re;
                        a >= x - r && a <= x + r
                    })
                    .count();
                prop_assert_eq!(fast, brute);
            }
        }

        #[test]
        fn counts_are_translation_invariant(shift in -30.0f64..30.0, x in -40.0f64..40.0) {
            let (zs, p, _) = lattice_setup(100);
            let shifted: Vec<ComplexPoint> = zs
                .zeros()
                .iter()
                .map(|z| ComplexPoint::new(z.re + shift, z.im))
                .filter(|z| z.modulus() > 0.0)
                .collect();
            prop_assume!(!shifted.is_empty());
            let zs2 = validate_sequence(&shifted).unwrap();
            let w = Weight::Log { c: 1.0 };
            let p2 = partition_near_real(&zs2, &w, 1.0).unwrap();
            // translation can only move zeros between M' and M'' via the
            // weight argument; with an all-real sequence membership is total
            prop_assert_eq!(p2.m_prime().len(), zs2.len());
            let a = m_re(&p, &zs, x, 1.0).unwrap();
            let b = m_re(&p2, &zs2, x + shift, 1.0).unwrap();
            // the shifted sequence may have dropped a zero that landed on 0
            if shifted.len() == zs.len() {
                prop_assert_eq!(a, b);
            }
        }
    }
}
