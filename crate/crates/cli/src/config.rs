//! Experiment configuration: a TOML file with dotted keys plus command-line
//! overrides. Every field is echoed into the report so a run can be
//! reproduced from its output alone.

use anyhow::{bail, Context, Result};
use canprod::Weight;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    VerifyInvertible,
    Counterexample,
    ProjectionEquivalence,
    Prop1Witness,
    WeightAudit,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::VerifyInvertible => "verify-invertible",
            Scenario::Counterexample => "counterexample",
            Scenario::ProjectionEquivalence => "projection-equivalence",
            Scenario::Prop1Witness => "prop1-witness",
            Scenario::WeightAudit => "weight-audit",
        }
    }
}

/// Weight-audit specific knobs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_doubling_k")]
    pub k: f64,
}

fn default_t_max() -> f64 {
    1e6
}
fn default_doubling_k() -> f64 {
    2.0
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            t_max: default_t_max(),
            k: default_doubling_k(),
        }
    }
}

/// Cluster-fixture specific knobs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    #[serde(default = "default_spacing")]
    pub spacing: f64,
}

fn default_spacing() -> f64 {
    0.02
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            spacing: default_spacing(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Zero-set source: a CSV/JSON file path or a builtin spec
    /// (`lattice:N`, `perturbed:N`, `clusters:J`, `one-sided:N`).
    pub zeros: String,
    #[serde(default = "default_weight")]
    pub weight: Weight,
    #[serde(default = "default_m0")]
    pub m0: f64,
    #[serde(default = "default_a_max")]
    pub a_max: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_probes")]
    pub probes: usize,
    /// Probe range `[x_min, x_max]`; scenario-specific defaults apply when
    /// absent.
    #[serde(default)]
    pub range: Option<(f64, f64)>,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub audit: AuditConfig,
    #[serde(default)]
    pub cluster: ClusterConfig,
}

fn default_weight() -> Weight {
    Weight::Log { c: 1.0 }
}
fn default_m0() -> f64 {
    1.0
}
fn default_a_max() -> f64 {
    64.0
}
fn default_tol() -> f64 {
    1e-6
}
fn default_probes() -> usize {
    50
}

/// Flag overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub range: Option<(f64, f64)>,
    pub probes: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: ExperimentConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(s) = overrides.scenario {
            cfg.scenario = s;
        }
        if let Some(dir) = &overrides.output_dir {
            cfg.output_dir = dir.clone();
        }
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = overrides.tol {
            cfg.tol = tol;
        }
        if let Some(range) = overrides.range {
            cfg.range = Some(range);
        }
        if let Some(probes) = overrides.probes {
            cfg.probes = probes;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.zeros.trim().is_empty() {
            bail!("config: zeros must name a file or builtin spec");
        }
        self.weight
            .validate()
            .map_err(|e| anyhow::anyhow!("config: weight invalid: {e}"))?;
        if !(self.m0 > 0.0) {
            bail!("config: m0 must be positive, got {}", self.m0);
        }
        if !(self.a_max > 0.0) {
            bail!("config: a_max must be positive, got {}", self.a_max);
        }
        if !(self.tol > 0.0) {
            bail!("config: tol must be positive, got {}", self.tol);
        }
        if self.probes < 2 {
            bail!("config: need at least 2 probes, got {}", self.probes);
        }
        if let Some((lo, hi)) = self.range {
            if !(lo > 0.0 && hi > lo) {
                bail!("config: range must satisfy 0 < min < max, got [{lo}, {hi}]");
            }
        }
        if !(self.audit.t_max >= 1e3) {
            bail!("config: audit.t_max must be >= 1e3");
        }
        if !(self.audit.k > 1.0) {
            bail!("config: audit.k must exceed 1");
        }
        if !(self.cluster.spacing > 0.0) {
            bail!("config: cluster.spacing must be positive");
        }
        Ok(())
    }
}

/// Parses `a:b` into a range pair.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `min:max`, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("bad min `{a}`: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("bad max `{b}`: {e}"))?;
    if !(lo > 0.0 && hi > lo) {
        return Err(format!("range must satisfy 0 < min < max, got [{lo}, {hi}]"));
    }
    Ok((lo, hi))
}

/// Parses a CLI weight spec `family:param`, e.g. `log:1.0`, `power:0.25`,
/// `exp-sqrt-log:1.0`.
pub fn parse_weight(s: &str) -> Result<Weight, String> {
    let (family, param) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `family:param`, got `{s}`"))?;
    let v: f64 = param
        .trim()
        .parse()
        .map_err(|e| format!("bad weight parameter `{param}`: {e}"))?;
    let w = match family.trim() {
        "log" => Weight::Log { c: v },
        "power" => Weight::Power { p: v },
        "exp-sqrt-log" | "exp_sqrt_log" => Weight::ExpSqrtLog { q: v },
        other => return Err(format!("unknown weight family `{other}` (tabulated weights are config-file only)")),
    };
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}
