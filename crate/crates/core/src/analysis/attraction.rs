use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::engine::{integrate, State, StepperConfig};
use crate::equilibria::Equilibrium;
use crate::model::{HistoryFunction, ModelSpec, Profile};

/// Convergence thresholds: relative for `x`, `y`; absolute (scaled by
/// `max(yj*, 1)`) for `yj`.
pub const REL_TOL_XY: f64 = 1e-4;
pub const TOL_YJ: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttractionRun {
    pub index: usize,
    pub terminal: State,
    pub rel_err_x: f64,
    pub rel_err_y: f64,
    pub err_yj: f64,
    pub converged: bool,
}

impl AttractionRun {
    fn score(&self) -> f64 {
        (self.rel_err_x / REL_TOL_XY).max(self.rel_err_y / REL_TOL_XY).max(self.err_yj / TOL_YJ)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub runs: Vec<AttractionRun>,
    pub all_converged: bool,
    /// Index of the run furthest from the equilibrium, relative to the
    /// thresholds.
    pub worst: usize,
}

/// `n` constant-plus-sine histories with bases drawn from
/// `[0.1, 2] × (x*, y*)`, amplitudes up to half the base and frequencies in
/// `[0.5, 5]`. Juveniles are made consistent.
pub fn random_histories(spec: &ModelSpec, eq: &Equilibrium, n: usize, seed: u64) -> Vec<HistoryFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profile = |scale: f64, rng: &mut ChaCha8Rng| {
        let base = scale * rng.gen_range(0.1..2.0);
        Profile::Sine {
            base,
            amplitude: base * rng.gen_range(0.0..0.5),
            omega: rng.gen_range(0.5..5.0),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    };
    (0..n)
        .map(|_| {
            let prey = profile(eq.x, &mut rng);
            let predator = profile(eq.y, &mut rng);
            HistoryFunction { prey, juvenile: Profile::Constant { value: 0.0 }, predator }
                .with_consistent_juveniles(spec)
        })
        .collect()
}

/// Integrates each history to `horizon` and compares the terminal state
/// with `eq`. Divergent runs are reported, not raised; only an integration
/// failure is an error.
pub fn global_attraction_probe(
    spec: &ModelSpec,
    eq: &Equilibrium,
    histories: &[HistoryFunction],
    horizon: f64,
    stepper: &StepperConfig,
) -> Result<ConvergenceReport, AnalysisError> {
    let cfg = StepperConfig { t_end: horizon, ..*stepper };
    let runs = histories
        .par_iter()
        .enumerate()
        .map(|(index, h)| {
            let traj = integrate(spec, h, &cfg).map_err(|source| AnalysisError::Integration { index, source })?;
            let terminal = traj.final_state();
            let rel_err_x = (terminal.x - eq.x).abs() / eq.x.abs().max(f64::MIN_POSITIVE);
            let rel_err_y = (terminal.y - eq.y).abs() / eq.y.abs().max(f64::MIN_POSITIVE);
            let err_yj = (terminal.yj - eq.yj).abs() / eq.yj.max(1.0);
            Ok(AttractionRun {
                index,
                terminal,
                rel_err_x,
                rel_err_y,
                err_yj,
                converged: rel_err_x <= REL_TOL_XY && rel_err_y <= REL_TOL_XY && err_yj <= TOL_YJ,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let worst = runs
        .iter()
        .max_by(|a, b| a.score().total_cmp(&b.score()))
        .map_or(0, |r| r.index);
    Ok(ConvergenceReport { all_converged: runs.iter().all(|r| r.converged), runs, worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::solve_coexistence;
    use crate::model::{DelayFunction, FunctionalResponse, ModelParams};

    fn spec() -> ModelSpec {
        ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj: 0.5, d: 0.2 },
            delay: DelayFunction::saturating(0.5, 1.0, 2.0),
            response: FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1: 0.0, k2: 10.0 },
        }
    }

    #[test]
    fn histories_are_reproducible_and_positive() {
        let s = spec();
        let eq = solve_coexistence(&s).unwrap();
        let a = random_histories(&s, &eq, 4, 7);
        assert_eq!(a, random_histories(&s, &eq, 4, 7));
        assert_ne!(a, random_histories(&s, &eq, 4, 8));
        for h in &a {
            assert!(h.check(&s).is_admissible());
        }
    }

    #[test]
    fn equilibrium_history_stays_put() {
        let s = spec();
        let eq = solve_coexistence(&s).unwrap();
        let h = HistoryFunction::constant(eq.x, eq.y, eq.yj);
        let cfg = StepperConfig::default().with_tolerances(1e-10, 1e-12);
        let rep = global_attraction_probe(&s, &eq, &[h], 50.0, &cfg).unwrap();
        assert!(rep.all_converged);
        assert!(rep.runs[0].rel_err_x < 1e-8, "{:?}", rep.runs[0]);
    }
}
