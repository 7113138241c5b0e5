//! `canprod` — canonical products over zero sequences: evaluation, the
//! Ehrenpreis slow-decrease criterion, and zero-counting statistics.
//!
//! Exit codes: 0 success, 1 scenario verdict "fail", 2 config or ingestion
//! error, 3 internal error.

mod config;
mod fixtures;
mod ingest;
mod report;
mod scenarios;

use anyhow::{anyhow, Context, Result};
use canprod::invertibility::{CanonicalEvaluator, CompletedEvaluator};
use canprod::{
    fit_a, log_probes, partition_near_real, sd_scan, CompiledProduct, LogModulus,
    ProductVariant, Weight,
};
use clap::{Args, Parser, Subcommand};
use config::{parse_range, parse_weight, ExperimentConfig, Overrides, Scenario};
use report::{fmt_f64, Table};
use scenarios::RunError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "canprod", version, about = "canonical products, slow decrease, zero counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the data-producing subcommands.
#[derive(Args, Clone)]
struct ZeroSetArgs {
    /// Zero-set source: CSV/JSON path or builtin
    /// (lattice:N, perturbed:N, clusters:J, one-sided:N)
    #[arg(long)]
    zeros: String,
    /// Weight family as family:param (log:1.0, power:0.25, exp-sqrt-log:1.0)
    #[arg(long, value_parser = parse_weight, default_value = "log:1.0")]
    weight: Weight,
    /// Near-real band constant
    #[arg(long, default_value_t = 1.0)]
    m0: f64,
    /// Seed for generated fixtures
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cluster spacing for the clusters:J fixture
    #[arg(long, default_value_t = 0.02)]
    spacing: f64,
}

impl ZeroSetArgs {
    fn load(&self) -> Result<fixtures::LoadedZeros> {
        fixtures::load_spec(&self.zeros, self.seed, &self.weight, self.m0, self.spacing)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a builtin zero-set fixture and write it to a file
    Gen {
        #[command(flatten)]
        zeroset: ZeroSetArgs,
        /// Output path; `.json` writes JSON, anything else CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate ln|psi| on the real axis and write a trace table
    Eval {
        #[command(flatten)]
        zeroset: ZeroSetArgs,
        /// Real-axis grid as min:max
        #[arg(long, value_parser = parse_range)]
        range: (f64, f64),
        /// Number of grid points
        #[arg(long, default_value_t = 256)]
        points: usize,
        /// Product variant: plain, projected, or half-projected
        #[arg(long, default_value = "plain")]
        variant: String,
        /// Convergence tolerance
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Use the tail-completed full sum instead of the canonical ladder
        #[arg(long)]
        completed: bool,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the minimal slow-decrease constant over a range
    SdFit {
        #[command(flatten)]
        zeroset: ZeroSetArgs,
        #[arg(long, value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = 50)]
        probes: usize,
        #[arg(long, default_value_t = 64.0)]
        a_max: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Counting statistics: ratio profile and bounded/unbounded verdict
    Stats {
        #[command(flatten)]
        zeroset: ZeroSetArgs,
        #[arg(long, value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = canprod::stats::DEFAULT_THRESHOLD_SLOPE)]
        threshold_slope: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named experiment scenario from a config file
    Experiment {
        /// TOML config path
        #[arg(long)]
        config: PathBuf,
        /// Override the output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario
        #[arg(long, value_enum)]
        scenario: Option<Scenario>,
        /// Override the seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Override the probe range (min:max)
        #[arg(long, value_parser = parse_range)]
        range: Option<(f64, f64)>,
        /// Override the probe count
        #[arg(long)]
        probes: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { zeroset, out } => {
            let loaded = zeroset.load()?;
            ingest::write_zeroset(&out, &loaded.zeros)?;
            println!(
                "wrote {} zeros (coverage {}) to {}",
                loaded.zeros.len(),
                fmt_f64(loaded.zeros.coverage_radius()),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            zeroset,
            range,
            points,
            variant,
            tol,
            completed,
            out,
        } => {
            let loaded = zeroset.load()?;
            let partition = partition_near_real(&loaded.zeros, &zeroset.weight, zeroset.m0)
                .map_err(|e| anyhow!("{e}"))?;
            let variant = match variant.as_str() {
                "plain" => ProductVariant::Plain,
                "projected" => ProductVariant::Projected(partition),
                "half-projected" => ProductVariant::HalfProjected(partition),
                other => return Err(anyhow!("unknown variant `{other}`")),
            };
            let compiled = CompiledProduct::compile(&loaded.zeros, &variant)
                .map_err(|e| anyhow!("{e}"))?;
            let xs = log_probes(range.0, range.1, points.max(2));
            let table = if completed {
                let eval = CompletedEvaluator::new(&compiled);
                trace(&eval, &xs)
            } else {
                let eval = CanonicalEvaluator::new(&compiled, tol);
                trace(&eval, &xs)
            };
            let paths = report::emit_plotdata(&out, &[table])?;
            println!("wrote {}", paths[0].display());
            Ok(ExitCode::SUCCESS)
        }
        Command::SdFit {
            zeroset,
            range,
            probes,
            a_max,
            tol,
            out,
        } => {
            let loaded = zeroset.load()?;
            let compiled = CompiledProduct::compile(&loaded.zeros, &ProductVariant::Plain)
                .map_err(|e| anyhow!("{e}"))?;
            let eval = CanonicalEvaluator::new(&compiled, tol);
            let fit = fit_a(&eval, range, probes, a_max, &[]).map_err(|e| anyhow!("{e}"))?;
            let mut fit_table = Table::new("fit_by_range", "x_max,fitted_a");
            match fit.fitted() {
                Some(a) => {
                    fit_table.row(format!("{},{}", fmt_f64(range.1), fmt_f64(a)));
                    let scan = sd_scan(&eval, &log_probes(range.0, range.1, probes), a)
                        .map_err(|e| anyhow!("{e}"))?;
                    let mut tables = vec![fit_table, witnesses_table(&scan)];
                    tables.sort_by_key(|t| t.name);
                    report::emit_plotdata(&out, &tables)?;
                    println!("fitted a = {a} on [{}, {}]", range.0, range.1);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    fit_table.row(format!("{},not-found", fmt_f64(range.1)));
                    report::emit_plotdata(&out, &[fit_table])?;
                    println!(
                        "no constant up to a_max = {a_max} passes on [{}, {}]",
                        range.0, range.1
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Stats {
            zeroset,
            range,
            threshold_slope,
            out,
        } => {
            let loaded = zeroset.load()?;
            let partition = partition_near_real(&loaded.zeros, &zeroset.weight, zeroset.m0)
                .map_err(|e| anyhow!("{e}"))?;
            let report_t = canprod::theorem1_check(
                &partition,
                &loaded.zeros,
                &zeroset.weight,
                range,
                threshold_slope,
            )
            .map_err(|e| anyhow!("{e}"))?;
            let mut table = Table::new("ratio_profile", "x,m_re,l,ratio");
            let p = &report_t.profile;
            for i in 0..p.xs.len() {
                table.row(format!(
                    "{},{},{},{}",
                    fmt_f64(p.xs[i]),
                    p.counts[i],
                    fmt_f64(p.weights[i]),
                    fmt_f64(p.ratios[i])
                ));
            }
            report::emit_plotdata(&out, &[table])?;
            println!(
                "verdict: {:?} (sup_ratio {}, trend_slope {})",
                report_t.verdict,
                fmt_f64(p.sup_ratio),
                fmt_f64(p.trend_slope)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment {
            config,
            out,
            scenario,
            seed,
            tol,
            range,
            probes,
        } => {
            let overrides = Overrides {
                scenario,
                output_dir: out,
                seed,
                tol,
                range,
                probes,
            };
            let cfg = ExperimentConfig::load(&config, &overrides)
                .context("loading experiment config")?;
            match scenarios::run_experiment(&cfg) {
                Ok(outcome) => {
                    println!(
                        "{}: {} ({})",
                        cfg.scenario.name(),
                        outcome.verdict,
                        outcome.report_path.display()
                    );
                    Ok(if outcome.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                Err(RunError::Config(e)) => {
                    eprintln!("error: {e:#}");
                    Ok(ExitCode::from(2))
                }
                Err(RunError::Internal(e)) => {
                    eprintln!("internal error: {e:#}");
                    Ok(ExitCode::from(3))
                }
            }
        }
    }
}

fn trace<F: LogModulus + ?Sized>(f: &F, xs: &[f64]) -> Table {
    let mut t = Table::new("trace_psi", "x,log_abs,usable");
    for &x in xs {
        match f.log_modulus_real(x) {
            Ok(v) => t.row(format!("{},{},true", fmt_f64(x), fmt_f64(v))),
            Err(_) => t.row(format!("{},,false", fmt_f64(x))),
        }
    }
    t
}

fn witnesses_table(report: &canprod::SlowDecreaseReport) -> Table {
    let mut t = Table::new("witnesses", "x,x_prime,log_mod,threshold,found,eval_failures");
    for w in &report.probes {
        t.row(format!(
            "{},{},{},{},{},{}",
            fmt_f64(w.x),
            fmt_f64(w.x_prime),
            fmt_f64(w.log_mod),
            fmt_f64(w.threshold),
            w.found,
            w.eval_failures
        ));
    }
    t
}
