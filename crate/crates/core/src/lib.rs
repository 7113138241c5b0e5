//! Numerics for entire functions given by canonical products over their zeros.
//!
//! The crate works with finite, validated zero sequences (sorted by modulus,
//! multiplicity by repetition) and provides:
//!
//! * [`zero_model`] — zero sequences, admissible weight functions, the
//!   near-real partition and its real-part projection, plus fixture
//!   generators (integer lattice, perturbed lattice, real clusters);
//! * [`product`] — numerically careful evaluation of `ln|psi(z)|` for the
//!   canonical product and its projected / half-projected / modified
//!   variants, with shell-grouped compensated summation, a symmetric tail
//!   model and per-point convergence diagnostics;
//! * [`invertibility`] — witness searches for the Ehrenpreis slow-decrease
//!   criterion, fitting of the minimal criterion constant over a range, and
//!   lower-bound witness searches near the real axis;
//! * [`stats`] — counting statistics of real parts of near-real zeros and
//!   the bounded/unbounded verdict on their density relative to a weight.
//!
//! Everything is pure and deterministic; batch entry points may fan out over
//! a thread pool but results are gathered in input order.

pub mod invertibility;
pub mod product;
pub mod stats;
pub mod zero_model;

mod kahan;
mod point;

pub use invertibility::{
    fit_a, log_probes, prop1_witness, sd_scan, sd_witness, EvalError, FitOutcome, LogModulus,
    Prop1SearchMode, Prop1Witness, SDWitness, SearchError, SlowDecreaseReport,
};
pub use point::ComplexPoint;
pub use product::{
    eval_grid, log_abs_canonical, log_abs_partial, type_estimate, CompiledProduct,
    ConvergenceStatus, EngineParams, LogModulusResult, ProductError, ProductVariant,
};
pub use stats::{m_re, ratio_profile, theorem1_check, RatioProfile, StatsError, Theorem1Report, Theorem1Verdict};
pub use zero_model::{
    check_weight, partition_near_real, project_real_parts, validate_sequence, ClusterSpec,
    ModelError, NearRealPartition, Weight, WeightReport, ZeroSequence,
};
