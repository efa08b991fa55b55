use rayon::prelude::*;
use serde::Serialize;

use super::{tail_nodes, AnalysisError};
use crate::engine::{integrate, State, StepperConfig};
use crate::equilibria::solve_coexistence;
use crate::model::{HistoryFunction, ModelSpec, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Permanent,
    Extinction,
}

/// Per-history statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSummary {
    pub index: usize,
    pub tail_min_prey: f64,
    pub tail_min_predator: f64,
    pub terminal: State,
    /// Max-norm distance of the terminal state from `(K, 0, 0)`.
    pub distance_to_capacity: f64,
    /// Terminal state within tolerance of `(K, 0, 0)`.
    pub extinct: bool,
    /// Not extinct and both tail minima above the floor.
    pub persistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyVerdict {
    pub outcome: Outcome,
    pub reproduction_number: f64,
    /// `R` equals one to relative `1e−12`.
    pub boundary_case: bool,
    pub runs: Vec<RunSummary>,
}

/// Tolerances used by [`permanence_probe`].
pub const PERSISTENCE_FLOOR: f64 = 1e-6;
pub const EXTINCTION_TOL: f64 = 1e-3;

/// Integrates every history to `horizon` and sorts the runs into
/// extinct (terminal state within `1e−3` of `(K, 0, 0)`) and persistent
/// (tail minima of `x` and `y` above `1e−6`). All runs must agree.
///
/// `stepper` supplies tolerances and step caps; its horizon is replaced.
pub fn permanence_probe(
    spec: &ModelSpec,
    histories: &[HistoryFunction],
    horizon: f64,
    tail_fraction: f64,
    stepper: &StepperConfig,
) -> Result<DichotomyVerdict, AnalysisError> {
    const MIN_HISTORIES: usize = 5;
    if histories.len() < MIN_HISTORIES {
        return Err(AnalysisError::TooFewHistories { needed: MIN_HISTORIES, got: histories.len() });
    }
    let cfg = StepperConfig { t_end: horizon, ..*stepper };
    let k = spec.params.k;
    let runs = histories
        .par_iter()
        .enumerate()
        .map(|(index, h)| {
            let traj = integrate(spec, h, &cfg).map_err(|source| AnalysisError::Integration { index, source })?;
            let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
            for u in &traj.dense().values()[tail_nodes(&traj, tail_fraction)] {
                min_x = min_x.min(u[0]);
                min_y = min_y.min(u[1]);
            }
            let terminal = traj.final_state();
            let distance = (terminal.x - k).abs().max(terminal.y.abs()).max(terminal.yj.abs());
            let extinct = distance <= EXTINCTION_TOL;
            Ok(RunSummary {
                index,
                tail_min_prey: min_x,
                tail_min_predator: min_y,
                terminal,
                distance_to_capacity: distance,
                extinct,
                persistent: !extinct && min_x > PERSISTENCE_FLOOR && min_y > PERSISTENCE_FLOOR,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let persistent = runs.iter().filter(|r| r.persistent).count();
    let extinct = runs.iter().filter(|r| r.extinct).count();
    let r = spec.reproduction_number();
    let outcome = if persistent == runs.len() {
        Outcome::Permanent
    } else if extinct == runs.len() {
        Outcome::Extinction
    } else {
        let unresolved = runs.len() - persistent - extinct;
        return Err(AnalysisError::Inconclusive { persistent, extinct, unresolved, runs });
    };
    Ok(DichotomyVerdict { outcome, reproduction_number: r, boundary_case: (r - 1.0).abs() <= 1e-12, runs })
}

/// `count` constant-plus-sine histories whose magnitudes run
/// geometrically from `0.01` to `10` times a reference state: the
/// coexistence point when it exists, otherwise `(K/2, K/10)`. Juveniles
/// are made consistent.
pub fn spanning_histories(spec: &ModelSpec, count: usize) -> Vec<HistoryFunction> {
    let (x_ref, y_ref) = match solve_coexistence(spec) {
        Ok(eq) => (eq.x, eq.y),
        Err(_) => (0.5 * spec.params.k, 0.1 * spec.params.k),
    };
    let count = count.max(2);
    (0..count)
        .map(|i| {
            let scale = 0.01 * 1000f64.powf(i as f64 / (count - 1) as f64);
            let omega = 1.0 + i as f64;
            HistoryFunction {
                prey: Profile::Sine { base: scale * x_ref, amplitude: 0.3 * scale * x_ref, omega, phase: 0.0 },
                juvenile: Profile::Constant { value: 0.0 },
                predator: Profile::Sine { base: scale * y_ref, amplitude: 0.2 * scale * y_ref, omega: 0.5 * omega, phase: 1.0 },
            }
            .with_consistent_juveniles(spec)
        })
        .collect()
}
