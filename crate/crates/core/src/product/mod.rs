//! Evaluation of `ln|psi(z)|` for canonical products over a zero sequence.
//!
//! The product is the limit over `R -> inf` of plain factors `(1 - z/mu)`
//! taken over zeros with `|mu| <= R`; no exponential convergence factors are
//! involved, so the limit is conditional and order matters. Terms are
//! grouped into geometric modulus shells (`R_{i+1} = 1.5 R_i`) and each shell
//! is summed with compensated accumulation before being added, which makes
//! the symmetric cancellation between `+mu` and `-mu` terms explicit and
//! gives the ladder of partial sums a meaningful Cauchy test.
//!
//! # Tail handling
//!
//! A finite sequence only describes the zero set up to its coverage radius
//! `R_max`. Beyond the truncation the engine models the zeros as a continuum
//! of `+-` symmetric pairs with the density measured near the top of the
//! covered range, and completes the partial sum with the exact integral of
//! that model,
//!
//! ```text
//! T(z, R) = (D/2) * Re[ -R ln(1 - z^2/R^2) + z ln((R - z)/(R + z)) ]
//! ```
//!
//! which for the integer lattice (`D = 2`) removes the `|z|^2 / R` drift of
//! raw partial products. What cannot be modelled is reported, not hidden:
//! `tail_estimate` bounds the residual via the discreteness of the first
//! missing shell, the measured density variation, the measured asymmetry of
//! the top shells (which for one-sided sequences is the dominant, divergent
//! contribution), and the accumulation rounding scale.
//!
//! # Convergence status
//!
//! A shell fully in the tail regime (`lower edge >= 2K|z|`, default `K = 2`)
//! of a conditionally convergent symmetric product has its sum bounded by
//! its second-order budget `sum |z/mu|^2`. A shell sum exceeding twice that
//! budget (plus the requested tolerance) indicates uncancelled first-order
//! mass; when the last three tail shells all exceed it, the evaluation is
//! flagged `NonConverged` (for a one-sided sequence the partial values drift
//! by `~ |z| D ln 1.5` per shell, orders of magnitude above the budget).
//! The flag is a desk-scale diagnostic, not a proof of divergence.

use crate::kahan::KahanSum;
use crate::point::ComplexPoint;
use crate::zero_model::{NearRealPartition, ZeroSequence};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProductError {
    #[error("sequence covers radius {coverage} but the tail regime needs 2K|z| = {required}")]
    Coverage { required: f64, coverage: f64 },
    #[error("|z| = {z_modulus} outside the completed-evaluation range (limit {limit})")]
    OutOfRange { z_modulus: f64, limit: f64 },
    #[error("near-real zero #{index} has zero real part; projected factor undefined")]
    ProjectedZeroRealPart { index: usize },
    #[error("no near-real zero within distance 1 of x = {center}; modified variant undefined")]
    EmptyCluster { center: f64 },
    #[error("partition covers {partition_len} zeros, sequence has {sequence_len}")]
    PartitionMismatch { partition_len: usize, sequence_len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("evaluation did not converge at z = {at}")]
    NonConverged { at: ComplexPoint },
}

/// Convergence status of a canonical evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    Converged,
    NonConverged,
    AtZero,
}

/// Value of `ln|psi(z)|` with truncation diagnostics.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LogModulusResult {
    /// Natural log of the modulus; `-inf` sentinel when `z` hits a zero.
    pub value: f64,
    /// Radius up to which zeros entered the sum.
    pub truncation_radius: f64,
    /// Bound on the residual beyond the tail model; always >= 0.
    pub tail_estimate: f64,
    pub status: ConvergenceStatus,
}

/// Which factors the product uses.
///
/// * `Plain` — `(1 - z/mu)` for every zero.
/// * `Projected` — near-real zeros contribute `(1 - z/alpha)` with their
///   real part `alpha`; far zeros are unchanged. Inclusion in a partial
///   product is still decided by the original modulus `|mu|`.
/// * `HalfProjected` — only near-real zeros in the closed upper half plane
///   are projected.
/// * `Modified` — plain factors for every zero, times `(z - c)^m` and
///   divided by `(z - alpha_k)` for each removed near-real index `k`
///   (`m` = number of removed indices).
#[derive(Clone, Debug)]
pub enum ProductVariant {
    Plain,
    Projected(NearRealPartition),
    HalfProjected(NearRealPartition),
    Modified {
        partition: NearRealPartition,
        center: f64,
        removed: Vec<usize>,
    },
}

impl ProductVariant {
    /// Builds the modified variant for a real center: removes every
    /// near-real zero whose real part lies within distance 1 of `center`.
    pub fn modified(
        zs: &ZeroSequence,
        partition: &NearRealPartition,
        center: f64,
    ) -> Result<Self, ProductError> {
        if !center.is_finite() {
            return Err(ProductError::InvalidParam(format!(
                "modification center must be finite, got {center}"
            )));
        }
        if partition.len() != zs.len() {
            return Err(ProductError::PartitionMismatch {
                partition_len: partition.len(),
                sequence_len: zs.len(),
            });
        }
        let removed: Vec<usize> = partition
            .m_prime()
            .iter()
            .copied()
            .filter(|&k| (zs.zeros()[k].re - center).abs() <= 1.0)
            .collect();
        if removed.is_empty() {
            return Err(ProductError::EmptyCluster { center });
        }
        Ok(ProductVariant::Modified {
            partition: partition.clone(),
            center,
            removed,
        })
    }

    /// Multiplicity of the modification (count of removed indices).
    pub fn modification_order(&self) -> Option<usize> {
        match self {
            ProductVariant::Modified { removed, .. } => Some(removed.len()),
            _ => None,
        }
    }
}

/// Engine knobs; defaults match the documented evaluation contract.
#[derive(Clone, Copy, Debug)]
pub struct EngineParams {
    /// Tail-regime constant `K > 1`: the tail analysis applies to shells
    /// beyond `2K|z|`, and canonical evaluation requires coverage of that
    /// radius.
    pub k: f64,
    /// Geometric ladder factor between shell radii.
    pub ladder_factor: f64,
    /// Number of trailing tail shells the drift test inspects.
    pub drift_shells: usize,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            k: 2.0,
            ladder_factor: 1.5,
            drift_shells: 3,
        }
    }
}

struct Modification {
    center: f64,
    order: usize,
    removed_alphas: Vec<f64>,
}

/// A zero sequence compiled for repeated evaluation under one variant:
/// effective zeros with precomputed logs and reciprocals, shell boundaries,
/// and the measured counting density of the top of the covered range.
pub struct CompiledProduct {
    params: EngineParams,
    /// Inclusion moduli (original `|mu|`), nondecreasing.
    mods: Vec<f64>,
    eff_re: Vec<f64>,
    eff_im: Vec<f64>,
    /// `ln |eff|` per term.
    ln_mod: Vec<f64>,
    inv_re: Vec<f64>,
    inv_im: Vec<f64>,
    /// `1 / |eff|^2` per term.
    inv_norm2: Vec<f64>,
    /// End index (exclusive) of each shell.
    shell_ends: Vec<usize>,
    /// Upper radius of each shell; the last equals the coverage radius.
    shell_radii: Vec<f64>,
    /// Zeros per unit modulus measured on `(R_max/2, R_max]`.
    density: f64,
    /// Spread of per-shell densities over the top shells.
    density_var: f64,
    modification: Option<Modification>,
}

impl CompiledProduct {
    pub fn compile(zs: &ZeroSequence, variant: &ProductVariant) -> Result<Self, ProductError> {
        Self::compile_with(zs, variant, EngineParams::default())
    }

    pub fn compile_with(
        zs: &ZeroSequence,
        variant: &ProductVariant,
        params: EngineParams,
    ) -> Result<Self, ProductError> {
        if !(params.k > 1.0) {
            return Err(ProductError::InvalidParam(format!(
                "K must exceed 1, got {}",
                params.k
            )));
        }
        if !(params.ladder_factor > 1.0) {
            return Err(ProductError::InvalidParam(format!(
                "ladder factor must exceed 1, got {}",
                params.ladder_factor
            )));
        }
        let check_partition = |p: &NearRealPartition| {
            if p.len() != zs.len() {
                Err(ProductError::PartitionMismatch {
                    partition_len: p.len(),
                    sequence_len: zs.len(),
                })
            } else {
                Ok(())
            }
        };

        let n = zs.len();
        let mut mods = Vec::with_capacity(n);
        let mut eff = Vec::with_capacity(n);
        for (k, z) in zs.zeros().iter().enumerate() {
            let substituted = match variant {
                ProductVariant::Plain | ProductVariant::Modified { .. } => *z,
                ProductVariant::Projected(p) => {
                    check_partition(p)?;
                    if p.is_near_real(k) {
                        if z.re == 0.0 {
                            return Err(ProductError::ProjectedZeroRealPart { index: k });
                        }
                        ComplexPoint::real(z.re)
                    } else {
                        *z
                    }
                }
                ProductVariant::HalfProjected(p) => {
                    check_partition(p)?;
                    if p.is_near_real(k) && z.im >= 0.0 {
                        if z.re == 0.0 {
                            return Err(ProductError::ProjectedZeroRealPart { index: k });
                        }
                        ComplexPoint::real(z.re)
                    } else {
                        *z
                    }
                }
            };
            mods.push(z.modulus());
            eff.push(substituted.to_complex());
        }

        let modification = match variant {
            ProductVariant::Modified {
                partition,
                center,
                removed,
            } => {
                check_partition(partition)?;
                if removed.is_empty() {
                    return Err(ProductError::EmptyCluster { center: *center });
                }
                Some(Modification {
                    center: *center,
                    order: removed.len(),
                    removed_alphas: removed.iter().map(|&k| zs.zeros()[k].re).collect(),
                })
            }
            _ => None,
        };

        // Shell boundaries: geometric ladder from the first modulus, last
        // shell stretched to the coverage radius so no sliver remains.
        let r_max = *mods.last().unwrap();
        let mut shell_radii = Vec::new();
        let mut r = mods[0];
        while r * params.ladder_factor < r_max {
            shell_radii.push(r);
            r *= params.ladder_factor;
        }
        shell_radii.push(r_max);
        let mut shell_ends = Vec::with_capacity(shell_radii.len());
        let mut idx = 0;
        for &radius in &shell_radii {
            while idx < n && mods[idx] <= radius {
                idx += 1;
            }
            shell_ends.push(idx);
        }
        *shell_ends.last_mut().unwrap() = n;

        // Measured counting density over the top half of the covered range.
        let half = r_max / 2.0;
        let below = mods.partition_point(|&m| m <= half);
        let density = if r_max > 0.0 {
            (n - below) as f64 / (r_max - half)
        } else {
            0.0
        };
        // Spread of per-shell densities across the last complete shells.
        let mut density_var: f64 = 0.0;
        let shells = shell_radii.len();
        for i in shells.saturating_sub(3)..shells {
            if i == 0 {
                continue;
            }
            let width = shell_radii[i] - shell_radii[i - 1];
            if width <= 0.0 {
                continue;
            }
            let count = (shell_ends[i] - shell_ends[i - 1]) as f64;
            density_var = density_var.max((count / width - density).abs());
        }

        // ln|eff| via norm_sqr so that the z = 0 term cancels exactly
        // against 0.5 ln(dist2).
        let ln_mod: Vec<f64> = eff.iter().map(|m| 0.5 * m.norm_sqr().ln()).collect();
        let inv: Vec<Complex64> = eff.iter().map(|m| m.inv()).collect();
        Ok(CompiledProduct {
            params,
            mods,
            eff_re: eff.iter().map(|m| m.re).collect(),
            eff_im: eff.iter().map(|m| m.im).collect(),
            ln_mod,
            inv_re: inv.iter().map(|m| m.re).collect(),
            inv_im: inv.iter().map(|m| m.im).collect(),
            inv_norm2: inv.iter().map(|m| m.norm_sqr()).collect(),
            shell_ends,
            shell_radii,
            density,
            density_var,
            modification,
        })
    }

    pub fn coverage_radius(&self) -> f64 {
        *self.shell_radii.last().unwrap()
    }

    /// Zeros per unit modulus measured near the top of the covered range.
    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    fn modification_terms(&self, z: Complex64) -> f64 {
        match &self.modification {
            None => 0.0,
            Some(m) => {
                let zc = Complex64::new(z.re - m.center, z.im);
                let mut sum = m.order as f64 * zc.norm().ln();
                for &alpha in &m.removed_alphas {
                    let d = Complex64::new(z.re - alpha, z.im);
                    sum -= d.norm().ln();
                }
                sum
            }
        }
    }

    /// Sum of `ln|1 - z/mu|` over zeros with inclusion modulus `<= radius`
    /// (variant substitutions applied), plus the modification factors when
    /// present (those are global and not radius-gated). Compensated
    /// accumulation keeps the rounding error near one ulp of the sum of
    /// absolute terms. Returns `-inf` when `z` coincides with an included
    /// zero.
    pub fn log_abs_partial(&self, z: ComplexPoint, radius: f64) -> f64 {
        let zc = z.to_complex();
        let prefix = self.mods.partition_point(|&m| m <= radius);
        let mut acc = KahanSum::new();
        for i in 0..prefix {
            let dx = self.eff_re[i] - zc.re;
            let dy = self.eff_im[i] - zc.im;
            let dist2 = dx * dx + dy * dy;
            if dist2 == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc.add(0.5 * dist2.ln() - self.ln_mod[i]);
        }
        acc.value() + self.modification_terms(zc)
    }

    /// Continuum tail model beyond radius `r` (see module docs); exact for a
    /// `+-` symmetric pair continuum of the measured density.
    pub fn tail_model(&self, z: ComplexPoint, r: f64) -> f64 {
        let zc = z.to_complex();
        if zc.norm() >= r {
            return 0.0;
        }
        let zr = zc / r;
        let one = Complex64::new(1.0, 0.0);
        let integral = -(one - zr * zr).ln() * r + zc * ((one - zr).ln() - (one + zr).ln());
        0.5 * self.density * integral.re
    }

    /// Bound on `|log_abs_partial(z, radius) - canonical value|`: the tail
    /// model magnitude at `radius` plus the residual uncertainty there
    /// (first-missing-shell discreteness, density variation scaled to the
    /// model magnitude, measured shell asymmetry, and rounding scale).
    pub fn tail_estimate_at(&self, z: ComplexPoint, radius: f64) -> f64 {
        let detail = self.evaluate(z, radius);
        self.tail_model(z, radius).abs() + detail.tail_uncertainty
    }

    /// Canonical evaluation at `z`: shell ladder to the coverage radius,
    /// tail-model completion, residual bound and drift status.
    ///
    /// Pre: `tol > 0` and the sequence covers `2K|z|`.
    pub fn log_abs_canonical(
        &self,
        z: ComplexPoint,
        tol: f64,
    ) -> Result<LogModulusResult, ProductError> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(ProductError::InvalidParam(format!(
                "tol must be positive and finite, got {tol}"
            )));
        }
        let required = 2.0 * self.params.k * z.modulus();
        let coverage = self.coverage_radius();
        if coverage < required {
            return Err(ProductError::Coverage { required, coverage });
        }
        let detail = self.evaluate(z, coverage);

        // Drift test over the trailing tail shells. It also runs when z hits
        // a zero exactly: the singular term is excluded from shell sums, and
        // divergence of the remaining product outranks the at-zero flag.
        let tail_lower = required;
        let mut status = ConvergenceStatus::Converged;
        let eligible: Vec<usize> = (0..detail.shells.len())
            .filter(|&i| detail.shells[i].lower_edge >= tail_lower)
            .collect();
        if eligible.len() >= self.params.drift_shells {
            let last = &eligible[eligible.len() - self.params.drift_shells..];
            let drifting = last.iter().all(|&i| {
                let s = &detail.shells[i];
                s.sum.abs() > tol + 2.0 * s.second_order
            });
            if drifting {
                status = ConvergenceStatus::NonConverged;
            }
        }

        if detail.hit_zero {
            let at_zero = status == ConvergenceStatus::Converged;
            return Ok(LogModulusResult {
                value: f64::NEG_INFINITY,
                truncation_radius: coverage,
                tail_estimate: if at_zero { 0.0 } else { detail.tail_uncertainty },
                status: if at_zero {
                    ConvergenceStatus::AtZero
                } else {
                    status
                },
            });
        }

        Ok(LogModulusResult {
            value: detail.completed,
            truncation_radius: coverage,
            tail_estimate: detail.tail_uncertainty,
            status,
        })
    }

    /// Tail-completed value without the ladder diagnostics, usable up to
    /// `|z| <= 0.995 * coverage` — the evaluator scenarios use for fully
    /// known finite zero sets whose probes approach the coverage radius.
    pub fn log_abs_completed(&self, z: ComplexPoint) -> Result<f64, ProductError> {
        let limit = 0.995 * self.coverage_radius();
        let zm = z.modulus();
        if zm > limit {
            return Err(ProductError::OutOfRange {
                z_modulus: zm,
                limit,
            });
        }
        let partial = self.log_abs_partial(z, self.coverage_radius());
        if partial == f64::NEG_INFINITY {
            return Ok(partial);
        }
        Ok(partial + self.tail_model(z, self.coverage_radius()))
    }

    fn evaluate(&self, z: ComplexPoint, radius: f64) -> EvalDetail {
        let zc = z.to_complex();
        let z_norm2 = zc.norm_sqr();
        let prefix = self.mods.partition_point(|&m| m <= radius);

        let mut shells = Vec::with_capacity(self.shell_radii.len());
        let mut total = KahanSum::new();
        let mut abs_terms = 0.0f64;
        let mut hit_zero = false;
        let mut start = 0usize;
        for s in 0..self.shell_ends.len() {
            let end = self.shell_ends[s].min(prefix);
            let lower_edge = if s == 0 { 0.0 } else { self.shell_radii[s - 1] };
            if end > start {
                let mut shell_sum = KahanSum::new();
                let mut second_order = 0.0f64;
                let mut inv_sum_re = 0.0f64;
                let mut inv_sum_im = 0.0f64;
                for i in start..end {
                    let dx = self.eff_re[i] - zc.re;
                    let dy = self.eff_im[i] - zc.im;
                    let dist2 = dx * dx + dy * dy;
                    if dist2 == 0.0 {
                        // singular term excluded; shell statistics still
                        // describe the rest of the product
                        hit_zero = true;
                        continue;
                    }
                    let term = 0.5 * dist2.ln() - self.ln_mod[i];
                    shell_sum.add(term);
                    abs_terms += term.abs();
                    second_order += z_norm2 * self.inv_norm2[i];
                    inv_sum_re += self.inv_re[i];
                    inv_sum_im += self.inv_im[i];
                }
                total.add(shell_sum.value());
                shells.push(ShellStat {
                    lower_edge,
                    upper_edge: self.shell_radii[s].min(radius),
                    sum: shell_sum.value(),
                    second_order,
                    first_order: (zc * Complex64::new(inv_sum_re, inv_sum_im)).re,
                });
                start = end;
            }
            if self.shell_ends[s] >= prefix {
                break;
            }
        }

        let partial = total.value();
        let model = self.tail_model(z, radius);
        let completed = partial + model + self.modification_terms(zc);

        // Residual bound components.
        let gap = if self.density > 0.0 {
            2.0 / self.density
        } else {
            1.0
        };
        let edge_ratio = z.modulus() / (radius + gap);
        let e_edge = if edge_ratio < 1.0 {
            0.5 * (1.0 - edge_ratio * edge_ratio).ln().abs()
        } else {
            f64::INFINITY
        };
        let e_density = if self.density > 0.0 {
            model.abs() * (self.density_var / self.density)
        } else {
            0.0
        };
        let tail_lower = 2.0 * self.params.k * z.modulus();
        let mut asym_shells: Vec<&ShellStat> = shells
            .iter()
            .filter(|s| s.lower_edge >= tail_lower)
            .collect();
        if asym_shells.is_empty() && !shells.is_empty() {
            asym_shells.push(shells.last().unwrap());
        }
        let e_asym = 3.0
            * asym_shells
                .iter()
                .rev()
                .take(3)
                .map(|s| s.first_order.abs())
                .fold(0.0f64, f64::max);
        let e_round = 4.0 * f64::EPSILON * abs_terms;
        let tail_uncertainty = e_edge + e_density + e_asym + e_round;

        EvalDetail {
            completed,
            hit_zero,
            shells,
            tail_uncertainty,
        }
    }
}

struct ShellStat {
    lower_edge: f64,
    #[allow(dead_code)]
    upper_edge: f64,
    sum: f64,
    second_order: f64,
    first_order: f64,
}

struct EvalDetail {
    completed: f64,
    hit_zero: bool,
    shells: Vec<ShellStat>,
    tail_uncertainty: f64,
}

/// One-shot partial product (see [`CompiledProduct::log_abs_partial`]).
pub fn log_abs_partial(
    zs: &ZeroSequence,
    variant: &ProductVariant,
    z: ComplexPoint,
    radius: f64,
) -> Result<f64, ProductError> {
    Ok(CompiledProduct::compile(zs, variant)?.log_abs_partial(z, radius))
}

/// One-shot canonical evaluation (see [`CompiledProduct::log_abs_canonical`]).
pub fn log_abs_canonical(
    zs: &ZeroSequence,
    variant: &ProductVariant,
    z: ComplexPoint,
    tol: f64,
) -> Result<LogModulusResult, ProductError> {
    CompiledProduct::compile(zs, variant)?.log_abs_canonical(z, tol)
}

/// Batch canonical evaluation, element-wise equal to individual calls.
/// Per-point failures are returned in place; the batch never aborts.
pub fn eval_grid(
    zs: &ZeroSequence,
    variant: &ProductVariant,
    points: &[ComplexPoint],
    tol: f64,
) -> Result<Vec<Result<LogModulusResult, ProductError>>, ProductError> {
    let compiled = CompiledProduct::compile(zs, variant)?;
    Ok(points
        .par_iter()
        .map(|&z| compiled.log_abs_canonical(z, tol))
        .collect())
}

/// Exponential-type estimate: max of `ln|psi(iy)| / y` over sampled `y` in
/// the upper half of `[1, y_max]` (the lower samples only reflect the local
/// shape near the origin; a polynomial's profile decays to 0 along the
/// ray, and the sup over the top half tracks that).
///
/// Pre: `y_max >= 10`. Uses canonical evaluation when the sequence covers
/// the tail regime `2K y_max`, and complete raw sums otherwise (a sequence
/// shorter than the tail regime is treated as a finite, fully known zero
/// set). Non-convergence at any sampled point is an error.
pub fn type_estimate(zs: &ZeroSequence, y_max: f64) -> Result<f64, ProductError> {
    if !(y_max >= 10.0) {
        return Err(ProductError::InvalidParam(format!(
            "y_max must be at least 10, got {y_max}"
        )));
    }
    let compiled = CompiledProduct::compile(zs, &ProductVariant::Plain)?;
    let canonical = compiled.coverage_radius() >= 2.0 * compiled.params.k * y_max;
    let samples = 64;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=samples {
        let y = y_max.powf(i as f64 / samples as f64); // geometric in [1, y_max]
        if y < y_max / 2.0 {
            continue;
        }
        let z = ComplexPoint::new(0.0, y);
        let value = if canonical {
            let r = compiled.log_abs_canonical(z, 1e-9)?;
            if r.status == ConvergenceStatus::NonConverged {
                return Err(ProductError::NonConverged { at: z });
            }
            r.value
        } else {
            compiled.log_abs_partial(z, compiled.coverage_radius())
        };
        best = best.max(value / y);
    }
    Ok(best)
}
