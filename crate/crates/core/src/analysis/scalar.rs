//! The scalar test equation
//! `v' = [1 − τ'(v) v'] a1 e^{−d_j τ(v)} v_τ / (1 + a2 v_τ) − a3 v`,
//! `v_τ = v(t − τ(v(t)))`.

use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::engine::{integrate_system, DelaySystem, StepperConfig};
use crate::model::{DelayFunction, Profile};
use crate::roots::bisect;

struct ScalarSystem<'a> {
    a: [f64; 3],
    dj: f64,
    delay: &'a DelayFunction,
    history: &'a Profile,
}

impl DelaySystem<1> for ScalarSystem<'_> {
    fn delay(&self, u: &[f64; 1]) -> f64 {
        self.delay.tau(u[0].max(0.0))
    }

    fn derivative(&self, _t: f64, u: &[f64; 1], _s: f64, lagged: &[f64; 1]) -> [f64; 1] {
        let [a1, a2, a3] = self.a;
        let v = u[0].max(0.0);
        let vl = lagged[0].max(0.0);
        let p = a1 * (-self.dj * self.delay.tau(v)).exp() * vl / (1.0 + a2 * vl);
        let tp = self.delay.tau_prime(v);
        [(p - a3 * u[0]) / (1.0 + tp * p)]
    }

    fn history(&self, t: f64) -> [f64; 1] {
        [self.history.eval(t)]
    }

    fn min_delay(&self) -> f64 {
        self.delay.tau_m()
    }

    fn max_delay(&self) -> f64 {
        self.delay.tau_max()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarLimit {
    /// Solution of `ṽ = (a1 e^{−d_j τ(ṽ)} − a3)/(a2 a3)`, or `0` when
    /// `a1 e^{−d_j τ(0)} ≤ a3`.
    pub fixed_point: f64,
    /// `a1 e^{−d_j τ(0)} ≤ a3`: no positive fixed point.
    pub extinction: bool,
    /// Time average of `v` over the last tenth of the horizon, per history.
    pub tail_averages: Vec<f64>,
    /// Largest `|tail − ṽ| / max(ṽ, 1e−12)`.
    pub max_relative_gap: f64,
}

/// Fixed point by bisection, `None` when `a1 e^{−d_j τ(0)} ≤ a3`.
pub fn scalar_fixed_point(a1: f64, a2: f64, a3: f64, dj: f64, delay: &DelayFunction) -> Option<f64> {
    let g = |v: f64| v - (a1 * (-dj * delay.tau(v)).exp() - a3) / (a2 * a3);
    let hi = (a1 * (-dj * delay.tau(0.0)).exp() - a3) / (a2 * a3);
    if !(hi > 0.0) {
        return None;
    }
    bisect(g, 0.0, hi, 300)
}

/// Integrates the scalar test equation from each history to `horizon` and
/// compares the tail averages with the fixed point to relative `1e−4`.
#[allow(clippy::too_many_arguments)]
pub fn scalar_limit(
    a1: f64,
    a2: f64,
    a3: f64,
    dj: f64,
    delay: &DelayFunction,
    histories: &[Profile],
    horizon: f64,
    stepper: &StepperConfig,
) -> Result<ScalarLimit, AnalysisError> {
    let fixed = scalar_fixed_point(a1, a2, a3, dj, delay);
    let cfg = StepperConfig { t_end: horizon, ..*stepper };
    let tails = histories
        .par_iter()
        .enumerate()
        .map(|(index, h)| {
            let sys = ScalarSystem { a: [a1, a2, a3], dj, delay, history: h };
            let dense = integrate_system(&sys, &cfg)
                .map_err(|e| AnalysisError::ScalarIntegration { index, message: e.to_string() })?;
            let t0 = 0.9 * horizon;
            let times = dense.times();
            let vals = dense.values();
            let start = times.partition_point(|&t| t < t0);
            let mut acc = 0.0;
            let mut span = 0.0;
            for i in start.max(1)..times.len() {
                let dt = times[i] - times[i - 1];
                acc += 0.5 * dt * (vals[i][0] + vals[i - 1][0]);
                span += dt;
            }
            Ok(if span > 0.0 { acc / span } else { vals[vals.len() - 1][0] })
        })
        .collect::<Result<Vec<f64>, AnalysisError>>()?;
    let target = fixed.unwrap_or(0.0);
    let gap = tails
        .iter()
        .map(|v| (v - target).abs() / target.max(1e-12))
        .fold(0.0, f64::max);
    let report = ScalarLimit { fixed_point: target, extinction: fixed.is_none(), tail_averages: tails, max_relative_gap: gap };
    if fixed.is_some() && gap > 1e-4 {
        return Err(AnalysisError::ScalarMismatch { gap, report: Box::new(report) });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_fixed_points() {
        let v = scalar_fixed_point(2.0, 1.0, 1.0, 0.0, &DelayFunction::constant(1.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        let tau = std::f64::consts::LN_2;
        let v = scalar_fixed_point(4.0, 1.0, 1.0, 1.0, &DelayFunction::constant(tau)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!(scalar_fixed_point(1.0, 1.0, 1.0, 0.0, &DelayFunction::constant(1.0)).is_none());
    }

    #[test]
    fn simulation_reaches_fixed_point() {
        let delay = DelayFunction::constant(1.0);
        let hs = vec![Profile::Constant { value: 0.2 }, Profile::Constant { value: 3.0 }];
        let cfg = StepperConfig::default().with_tolerances(1e-10, 1e-12);
        let out = scalar_limit(2.0, 1.0, 1.0, 0.0, &delay, &hs, 80.0, &cfg).unwrap();
        assert!(out.max_relative_gap < 1e-6);
    }
}
