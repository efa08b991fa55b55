use std::cell::Cell;

use serde::{Deserialize, Serialize};

use super::stepper::DelaySystem;
use super::LookupError;
use crate::model::{HistoryFunction, ModelSpec};

/// Point on a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub yj: f64,
}

impl State {
    pub fn new(t: f64, x: f64, y: f64, yj: f64) -> Self {
        Self { t, x, y, yj }
    }

    pub(crate) fn from_array(t: f64, u: &[f64; 3]) -> Self {
        Self { t, x: u[0], y: u[1], yj: u[2] }
    }
}

/// Right-hand side of the full system at one instant, with the
/// intermediate quantities that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub x: f64,
    pub y: f64,
    pub yj: f64,
    /// Lagged time `s = t − τ(y)`.
    pub lag_s: f64,
    /// Maturation flux `N`.
    pub recruitment: f64,
    /// `1 − τ'(y) y'`.
    pub correction: f64,
}

/// Evaluates the system at `now`. `lookup(s)` must return `(x(s), y(s))`.
///
/// Densities are clamped at zero before entering the response so that
/// stage values carrying roundoff below zero stay evaluable.
pub fn rhs<L>(spec: &ModelSpec, now: &State, lookup: L) -> Result<Rates, LookupError>
where
    L: FnOnce(f64) -> Result<(f64, f64), LookupError>,
{
    let s = now.t - spec.delay.tau(now.y.max(0.0));
    let (x_lag, y_lag) = lookup(s)?;
    Ok(rates_with_lag(spec, now, s, x_lag, y_lag))
}

pub(crate) fn rates_with_lag(spec: &ModelSpec, now: &State, s: f64, x_lag: f64, y_lag: f64) -> Rates {
    let p = &spec.params;
    let x = now.x.max(0.0);
    let y = now.y.max(0.0);
    let fxy = spec.response.rate(x, y);
    let recruitment = spec.recruitment(y, x_lag, y_lag);
    let tp = spec.delay.tau_prime(y);
    let correction = (1.0 + tp * p.d * y) / (1.0 + tp * recruitment);
    Rates {
        x: p.r * now.x * (1.0 - now.x / p.k) - fxy * y,
        y: (recruitment - p.d * now.y) / (1.0 + tp * recruitment),
        yj: p.n * fxy * y - p.dj * now.yj - correction * recruitment,
        lag_s: s,
        recruitment,
        correction,
    }
}

/// The model as a generic delay system in the order `[x, y, yj]`.
pub(crate) struct ModelSystem<'a> {
    pub spec: &'a ModelSpec,
    pub history: &'a HistoryFunction,
    pub min_correction: Cell<f64>,
}

impl<'a> ModelSystem<'a> {
    pub fn new(spec: &'a ModelSpec, history: &'a HistoryFunction) -> Self {
        Self { spec, history, min_correction: Cell::new(f64::INFINITY) }
    }
}

impl DelaySystem<3> for ModelSystem<'_> {
    fn delay(&self, u: &[f64; 3]) -> f64 {
        self.spec.delay.tau(u[1].max(0.0))
    }

    fn derivative(&self, t: f64, u: &[f64; 3], lag_time: f64, lagged: &[f64; 3]) -> [f64; 3] {
        let r = rates_with_lag(self.spec, &State::from_array(t, u), lag_time, lagged[0], lagged[1]);
        if r.correction < self.min_correction.get() {
            self.min_correction.set(r.correction);
        }
        [r.x, r.y, r.yj]
    }

    fn history(&self, t: f64) -> [f64; 3] {
        self.history.eval(t)
    }

    fn min_delay(&self) -> f64 {
        self.spec.delay.tau_m()
    }

    fn max_delay(&self) -> f64 {
        self.spec.delay.tau_max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DelayFunction, FunctionalResponse, ModelParams};

    #[test]
    fn constant_delay_has_no_correction() {
        let spec = ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj: 0.5, d: 1.0 },
            delay: DelayFunction::constant(1.0),
            response: FunctionalResponse::Linear { b: 1.0 },
        };
        let now = State::new(3.0, 1.0, 0.5, 0.2);
        let r = rhs(&spec, &now, |s| {
            assert_eq!(s, 2.0);
            Ok((1.5, 0.25))
        })
        .unwrap();
        let n = (-0.5f64).exp() * 1.5 * 0.25;
        assert_eq!(r.correction, 1.0);
        assert!((r.y - (n - 0.5)).abs() < 1e-15);
        assert!((r.x - (1.0 * 0.5 - 0.5)).abs() < 1e-15);
        assert!((r.yj - (0.5 - 0.1 - n)).abs() < 1e-15);
    }

    #[test]
    fn lookup_failure_propagates() {
        let spec = ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj: 0.5, d: 1.0 },
            delay: DelayFunction::constant(1.0),
            response: FunctionalResponse::Linear { b: 1.0 },
        };
        let e = rhs(&spec, &State::new(0.0, 1.0, 1.0, 1.0), |s| Err(LookupError::OutOfRange { t: s, lo: 0.0, hi: 1.0 }));
        assert!(e.is_err());
    }
}
