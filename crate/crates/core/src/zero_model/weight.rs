//! Admissible weight functions `l : [0, inf) -> [1, inf)` and the finite-range
//! audit of the three admissibility conditions:
//!
//! 1. `ln t = O(l(t))`,
//! 2. `limsup ln l(t) / ln t < 1/2`,
//! 3. `limsup l(K t) / l(t) < inf` for some `K > 1`.
//!
//! These are asymptotic statements; the audit evaluates them on a geometric
//! grid up to `t_max` and fits trends over the last two decades. The decision
//! rule for each condition is recorded in the report so a consumer can see
//! exactly which finite surrogate produced a verdict.

use super::ModelError;
use serde::{Deserialize, Serialize};

/// Comparison tolerance for all trend-based verdicts.
pub const TREND_TOLERANCE: f64 = 0.05;

/// Condition 2 threshold: the fitted log-log slope must stay below this.
pub const COND2_THRESHOLD: f64 = 0.5;

/// Weight family menu. Every family is clamped below at 1 so that the
/// codomain contract `l >= 1` holds for all `t >= 0` (the raw log family
/// dips below 1 for `t < e - 2`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Weight {
    /// `l(t) = c * ln(2 + t)`
    Log { c: f64 },
    /// `l(t) = (1 + t)^p`
    Power { p: f64 },
    /// `l(t) = exp(q * sqrt(ln(e + t)))`
    ExpSqrtLog { q: f64 },
    /// Sample grid with linear interpolation, held flat outside the grid.
    Tabulated { ts: Vec<f64>, ls: Vec<f64> },
}

impl Weight {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParam(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        match self {
            Weight::Log { c } => positive("c", *c),
            Weight::Power { p } => positive("p", *p),
            Weight::ExpSqrtLog { q } => positive("q", *q),
            Weight::Tabulated { ts, ls } => {
                if ts.len() != ls.len() || ts.len() < 2 {
                    return Err(ModelError::InvalidParam(
                        "tabulated weight needs matching ts/ls with at least 2 samples".into(),
                    ));
                }
                for w in ts.windows(2) {
                    if !(w[1] > w[0]) {
                        return Err(ModelError::InvalidParam(
                            "tabulated ts must be strictly increasing".into(),
                        ));
                    }
                }
                for (&t, &l) in ts.iter().zip(ls) {
                    if !l.is_finite() || l < 1.0 {
                        return Err(ModelError::WeightBelowOne { t, l });
                    }
                }
                for i in 1..ls.len() {
                    if ls[i] < ls[i - 1] {
                        return Err(ModelError::NonMonotoneWeight {
                            t_lo: ts[i - 1],
                            l_lo: ls[i - 1],
                            t_hi: ts[i],
                            l_hi: ls[i],
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Evaluates the weight at `t >= 0`, clamped below at 1.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        let raw = match self {
            Weight::Log { c } => c * (2.0 + t).ln(),
            Weight::Power { p } => (1.0 + t).powf(*p),
            Weight::ExpSqrtLog { q } => (q * (std::f64::consts::E + t).ln().sqrt()).exp(),
            Weight::Tabulated { ts, ls } => interpolate(ts, ls, t),
        };
        raw.max(1.0)
    }
}

fn interpolate(ts: &[f64], ls: &[f64], t: f64) -> f64 {
    if t <= ts[0] {
        return ls[0];
    }
    if t >= *ts.last().unwrap() {
        return *ls.last().unwrap();
    }
    let i = ts.partition_point(|&s| s <= t);
    let (t0, t1) = (ts[i - 1], ts[i]);
    let (l0, l1) = (ls[i - 1], ls[i]);
    l0 + (l1 - l0) * (t - t0) / (t1 - t0)
}

/// Finite-range audit outcome for the three admissibility conditions.
///
/// Profiles are sampled on the geometric grid `grid`; trend slopes are
/// ordinary least-squares fits against `ln t` over the last two decades.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightReport {
    pub t_max: f64,
    pub k: f64,
    pub grid: Vec<f64>,
    /// `ln t / l(t)` per grid point (condition 1 numerator profile).
    pub cond1_ratio_profile: Vec<f64>,
    /// Trend slope of `ln t / l(t)`; bounded profiles have slope near 0.
    pub cond1_trend_slope: f64,
    pub cond1_pass: bool,
    /// Fitted log-log slope of `l`, the finite surrogate for
    /// `limsup ln l(t) / ln t`.
    pub cond2_limsup_estimate: f64,
    pub cond2_pass: bool,
    /// `l(k t) / l(t)` per grid point.
    pub cond3_ratio_profile: Vec<f64>,
    /// sup of `l(k t) / l(t)` over the last two decades.
    pub cond3_sup_estimate: f64,
    /// Trend slope of `ln(l(kt)/l(t))`; a doubling-bounded weight stays flat.
    pub cond3_trend_slope: f64,
    pub cond3_pass: bool,
    /// Human-readable statement of the decision rule that produced verdicts.
    pub decision_rule: String,
}

impl WeightReport {
    pub fn all_pass(&self) -> bool {
        self.cond1_pass && self.cond2_pass && self.cond3_pass
    }
}

/// Audits the weight on a geometric grid up to `t_max` (pre: `t_max >= 1e3`,
/// `k > 1`). Errors if the sampled weight decreases anywhere on the grid.
pub fn check_weight(weight: &Weight, t_max: f64, k: f64) -> Result<WeightReport, ModelError> {
    weight.validate()?;
    if !(t_max >= 1e3) {
        return Err(ModelError::InvalidParam(format!(
            "t_max must be at least 1e3, got {t_max}"
        )));
    }
    if !(k > 1.0) || !k.is_finite() {
        return Err(ModelError::InvalidParam(format!("k must exceed 1, got {k}")));
    }

    let decades = t_max.log10();
    let n = ((decades * 32.0).ceil() as usize).max(64);
    let grid: Vec<f64> = (0..=n)
        .map(|i| 10f64.powf(decades * i as f64 / n as f64))
        .collect();

    let l: Vec<f64> = grid.iter().map(|&t| weight.eval(t)).collect();
    for i in 1..l.len() {
        if l[i] < l[i - 1] {
            return Err(ModelError::NonMonotoneWeight {
                t_lo: grid[i - 1],
                l_lo: l[i - 1],
                t_hi: grid[i],
                l_hi: l[i],
            });
        }
    }

    let cond1_ratio_profile: Vec<f64> = grid
        .iter()
        .zip(&l)
        .map(|(&t, &lt)| if t > 1.0 { t.ln() / lt } else { 0.0 })
        .collect();
    let cond3_ratio_profile: Vec<f64> = grid
        .iter()
        .zip(&l)
        .map(|(&t, &lt)| weight.eval(k * t) / lt)
        .collect();

    // Last two decades of the grid carry the asymptotic signal.
    let t_lo = t_max / 100.0;
    let tail: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] >= t_lo).collect();

    let slope_of = |ys: &[f64]| -> f64 {
        let pts: Vec<(f64, f64)> = tail.iter().map(|&i| (grid[i].ln(), ys[i])).collect();
        ols_slope(&pts)
    };

    let ln_l: Vec<f64> = l.iter().map(|&v| v.ln()).collect();
    let ln_cond3: Vec<f64> = cond3_ratio_profile
        .iter()
        .map(|&q| q.max(f64::MIN_POSITIVE).ln())
        .collect();
    let cond1_trend_slope = slope_of(&cond1_ratio_profile);
    let cond2_limsup_estimate = slope_of(&ln_l);
    let cond3_trend_slope = slope_of(&ln_cond3);
    let cond3_sup_estimate = tail
        .iter()
        .map(|&i| cond3_ratio_profile[i])
        .fold(f64::NEG_INFINITY, f64::max);

    let cond1_pass = cond1_trend_slope <= TREND_TOLERANCE;
    let cond2_pass = cond2_limsup_estimate < COND2_THRESHOLD - TREND_TOLERANCE;
    let cond3_pass = cond3_trend_slope <= TREND_TOLERANCE && cond3_sup_estimate.is_finite();

    Ok(WeightReport {
        t_max,
        k,
        grid,
        cond1_ratio_profile,
        cond1_trend_slope,
        cond1_pass,
        cond2_limsup_estimate,
        cond2_pass,
        cond3_ratio_profile,
        cond3_sup_estimate,
        cond3_trend_slope,
        cond3_pass,
        decision_rule: format!(
            "profiles on a geometric grid to t_max={t_max}; trends fitted by OLS against ln t \
             over the last two decades [{t_lo}, {t_max}]; condition 1 passes when the trend of \
             ln t / l(t) is <= {TREND_TOLERANCE}; condition 2 when the fitted log-log slope of l \
             is < {COND2_THRESHOLD} - {TREND_TOLERANCE}; condition 3 (K={k}) when l(Kt)/l(t) \
             has trend <= {TREND_TOLERANCE} and a finite sup"
        ),
    })
}

fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
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
    use approx::assert_abs_diff_eq;

    #[test]
    fn log_family_passes_all_conditions() {
        let r = check_weight(&Weight::Log { c: 1.0 }, 1e6, 2.0).unwrap();
        assert!(r.all_pass(), "log family should pass: {r:?}");
        // l(2t)/l(t) -> 1 from above
        assert!(r.cond3_sup_estimate < 1.1);
    }

    #[test]
    fn power_point_six_fails_condition_two_only() {
        let r = check_weight(&Weight::Power { p: 0.6 }, 1e6, 2.0).unwrap();
        assert!(r.cond1_pass);
        assert!(!r.cond2_pass);
        assert!(r.cond3_pass);
        assert_abs_diff_eq!(r.cond2_limsup_estimate, 0.6, epsilon = 0.01);
    }

    #[test]
    fn power_quarter_passes_all() {
        let r = check_weight(&Weight::Power { p: 0.25 }, 1e6, 2.0).unwrap();
        assert!(r.all_pass());
        assert_abs_diff_eq!(r.cond2_limsup_estimate, 0.25, epsilon = 0.01);
        // l(2t)/l(t) -> 2^0.25
        assert_abs_diff_eq!(r.cond3_sup_estimate, 2f64.powf(0.25), epsilon = 0.01);
    }

    #[test]
    fn exp_sqrt_log_passes_all() {
        let r = check_weight(&Weight::ExpSqrtLog { q: 1.0 }, 1e6, 2.0).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn constant_tabulated_weight_fails_condition_one() {
        let w = Weight::Tabulated {
            ts: vec![0.0, 1e7],
            ls: vec![1.0, 1.0],
        };
        let r = check_weight(&w, 1e6, 2.0).unwrap();
        assert!(!r.cond1_pass, "ln t is not O(1)");
        assert!(r.cond2_pass && r.cond3_pass);
    }

    #[test]
    fn decreasing_tabulated_weight_is_rejected() {
        let w = Weight::Tabulated {
            ts: vec![0.0, 10.0, 1e7],
            ls: vec![5.0, 3.0, 3.0],
        };
        assert!(matches!(
            check_weight(&w, 1e6, 2.0).unwrap_err(),
            ModelError::NonMonotoneWeight { .. }
        ));
    }

    #[test]
    fn preconditions_are_enforced() {
        let w = Weight::Log { c: 1.0 };
        assert!(check_weight(&w, 100.0, 2.0).is_err());
        assert!(check_weight(&w, 1e6, 1.0).is_err());
        assert!(Weight::Power { p: -0.5 }.validate().is_err());
    }

    #[test]
    fn families_are_clamped_at_one() {
        assert_eq!(Weight::Log { c: 1.0 }.eval(0.0), 1.0);
        assert!(Weight::Log { c: 1.0 }.eval(10.0) > 2.0);
        assert_eq!(Weight::Power { p: 0.3 }.eval(0.0), 1.0);
    }
}
