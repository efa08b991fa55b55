//! Model description: parameters, maturation-delay law, functional response
//! and initial history, plus the scalar quantities derived from them.
//!
//! The system being described is
//!
//! ```text
//! x'  = r x (1 − x/K) − f(x, y) y
//! yj' = n f(x, y) y − d_j yj − (1 − τ'(y) y') n e^{−d_j τ(y)} f(x_τ, y_τ) y_τ
//! y'  = (1 − τ'(y) y') n e^{−d_j τ(y)} f(x_τ, y_τ) y_τ − d y
//! ```
//!
//! with `x_τ = x(t − τ(y(t)))`, `y_τ = y(t − τ(y(t)))`.

mod delay;
mod history;
mod response;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use delay::{CustomDelay, DelayFunction, DelayLaw};
pub use history::{HistoryFunction, HistoryReport, Profile};
pub use response::FunctionalResponse;
pub use validate::{validate, Check, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("densities must be nonnegative (x = {x}, y = {y})")]
    NegativeDensity { x: f64, y: f64 },
    #[error("lagged recruitment must be nonnegative (got {0})")]
    NegativeRecruitment(f64),
}

/// `r, K, n, d_j, d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Prey intrinsic growth rate.
    pub r: f64,
    /// Prey carrying capacity.
    #[serde(rename = "K")]
    pub k: f64,
    /// Predator birth (conversion) rate.
    pub n: f64,
    /// Juvenile predator death rate.
    pub dj: f64,
    /// Mature predator death rate.
    pub d: f64,
}

impl ModelParams {
    pub fn all_positive(&self) -> bool {
        [self.r, self.k, self.n, self.dj, self.d]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
    }
}

/// Full immutable description of the model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub params: ModelParams,
    pub delay: DelayFunction,
    pub response: FunctionalResponse,
}

impl ModelSpec {
    /// Survival through maturation at delay `tau`: `e^{−d_j τ}`.
    pub fn survival(&self, tau: f64) -> f64 {
        (-self.params.dj * tau).exp()
    }

    /// Net reproduction number `R = n e^{−d_j τ(0)} f(K, 0) / d`.
    pub fn reproduction_number(&self) -> f64 {
        let p = &self.params;
        p.n * self.survival(self.delay.tau(0.0)) * self.response.rate(p.k, 0.0) / p.d
    }

    /// Maturation flux `N = n e^{−d_j τ(y)} f(x_τ, y_τ) y_τ` for current
    /// mature density `y` and lagged state `(x_τ, y_τ)`.
    pub fn recruitment(&self, y: f64, x_lag: f64, y_lag: f64) -> f64 {
        let (x_lag, y_lag) = (x_lag.max(0.0), y_lag.max(0.0));
        self.params.n * self.survival(self.delay.tau(y)) * self.response.rate(x_lag, y_lag) * y_lag
    }

    /// The factor `1 − τ'(y) y'(t)`, resolved in closed form from the
    /// implicit equation `y' = (1 − τ'(y) y') N − d y`:
    ///
    /// `(1 + τ'(y) d y) / (1 + τ'(y) N)`.
    pub fn correction_factor(&self, y: f64, recruitment: f64) -> Result<f64, ModelError> {
        if !(recruitment >= 0.0) {
            return Err(ModelError::NegativeRecruitment(recruitment));
        }
        if !(y >= 0.0) {
            return Err(ModelError::NegativeDensity { x: 0.0, y });
        }
        let tp = self.delay.tau_prime(y);
        Ok((1.0 + tp * self.params.d * y) / (1.0 + tp * recruitment))
    }

    /// Upper bound on `lim sup (n x + y + yj)`:
    /// `n K (m + r)^2 / (4 r m)` with `m = min(d_j, d)`.
    pub fn boundedness_limit(&self) -> f64 {
        let p = &self.params;
        let m = p.dj.min(p.d);
        p.n * p.k * (m + p.r).powi(2) / (4.0 * p.r * m)
    }

    /// Predator density cap used by grid checks and equilibrium brackets.
    pub fn predator_cap(&self) -> f64 {
        let v = self.boundedness_limit();
        if v.is_finite() && v > 0.0 {
            v
        } else {
            10.0 * self.params.k.max(1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(n: f64, dj: f64, tau: f64, b: f64, k: f64, d: f64) -> ModelSpec {
        ModelSpec {
            params: ModelParams { r: 1.0, k, n, dj, d },
            delay: DelayFunction::constant(tau),
            response: FunctionalResponse::Linear { b },
        }
    }

    #[test]
    fn reproduction_number_examples() {
        assert_eq!(linear(1.0, 0.0, 1.0, 1.0, 2.0, 1.0).reproduction_number(), 2.0);
        let r = linear(1.0, 1.0, std::f64::consts::LN_2, 1.0, 2.0, 1.0).reproduction_number();
        assert!((r - 1.0).abs() < 1e-15);
        let mut bd = linear(1.0, 0.3, 0.7, 1.0, 4.0, 0.5);
        bd.response = FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1: 0.25, k2: 3.0 };
        let expect = (-0.3f64 * 0.7).exp() * (4.0 / 2.0) / 0.5;
        assert!((bd.reproduction_number() - expect).abs() < 1e-14);
        let mut other_r = bd.clone();
        other_r.params.r = 7.0;
        assert_eq!(other_r.reproduction_number(), bd.reproduction_number());
    }

    #[test]
    fn correction_factor_examples() {
        let s = linear(1.0, 0.1, 1.0, 1.0, 2.0, 1.0);
        assert_eq!(s.correction_factor(2.0, 3.0).unwrap(), 1.0);
        let mut s2 = s.clone();
        s2.delay = DelayFunction::custom(|y| 0.1 * y, |_| 0.1, 0.0, f64::INFINITY);
        assert!((s2.correction_factor(2.0, 0.0).unwrap() - 1.2).abs() < 1e-15);
        assert!(s2.correction_factor(2.0, -1.0).is_err());
    }

    #[test]
    fn boundedness_limit_equal_rates() {
        let s = linear(1.5, 0.7, 1.0, 1.0, 3.0, 0.7);
        let expect = 1.5 * 3.0 * (0.7f64 + 1.0).powi(2) / (4.0 * 1.0 * 0.7);
        assert!((s.boundedness_limit() - expect).abs() < 1e-13);
    }
}
