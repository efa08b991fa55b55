//! Trajectory-level probes of long-run behaviour.

mod attraction;
mod bounded;
mod brackets;
mod comparison;
mod permanence;
mod scalar;

use thiserror::Error;

pub use attraction::{global_attraction_probe, random_histories, AttractionRun, ConvergenceReport};
pub use bounded::{boundedness_certificate, BoundednessCertificate};
pub use brackets::{extrapolated_bounds, monotone_bounds, BracketSequences, ExtrapolatedBounds, TauHat};
pub use comparison::{comparison_probe, ComparisonPair, ComparisonProblem, PairOutcome, ProbeReport};
pub use permanence::{permanence_probe, spanning_histories, DichotomyVerdict, Outcome, RunSummary};
pub use scalar::{scalar_fixed_point, scalar_limit, ScalarLimit};

use crate::engine::{IntegrationError, Trajectory};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("tail window {window} is shorter than 10 tau_M = {needed}")]
    InsufficientHorizon { window: f64, needed: f64 },
    #[error("need at least {needed} histories, got {got}")]
    TooFewHistories { needed: usize, got: usize },
    #[error("history {index} failed to integrate: {source}")]
    Integration {
        index: usize,
        #[source]
        source: IntegrationError,
    },
    #[error("scalar run {index} failed: {message}")]
    ScalarIntegration { index: usize, message: String },
    #[error("runs disagree: {persistent} persistent, {extinct} extinct, {unresolved} unresolved")]
    Inconclusive { persistent: usize, extinct: usize, unresolved: usize, runs: Vec<RunSummary> },
    #[error("response must be Beddington-DeAngelis with k2 > 0")]
    NotBeddingtonDeAngelis,
    #[error("bracket nesting fails at index {index}: {detail}")]
    Nesting { index: usize, detail: String, partial: Box<BracketSequences> },
    #[error("scalar limit disagrees with the fixed point (relative gap {gap})")]
    ScalarMismatch { gap: f64, report: Box<ScalarLimit> },
}

/// Node indices with `t ≥ (1 − tail_fraction) t_end`.
pub(crate) fn tail_nodes(traj: &Trajectory, tail_fraction: f64) -> std::ops::Range<usize> {
    let t0 = (1.0 - tail_fraction.clamp(0.0, 1.0)) * traj.t_end();
    let times = traj.dense().times();
    times.partition_point(|&t| t < t0)..times.len()
}
