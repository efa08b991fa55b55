//! Initial histories on `[−τ_M, 0]`.

use serde::{Deserialize, Serialize};

use super::ModelSpec;
use crate::quadrature;

/// One scalar history profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `base + amplitude · sin(omega · θ + phase)`
    Sine { base: f64, amplitude: f64, omega: f64, phase: f64 },
    /// Piecewise-linear through `(times[i], values[i])`, held constant
    /// outside the table.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl Profile {
    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Sine { base, amplitude, omega, phase } => base + amplitude * (omega * theta + phase).sin(),
            Self::Tabulated { times, values } => {
                if times.is_empty() {
                    return f64::NAN;
                }
                let i = times.partition_point(|&t| t <= theta);
                if i == 0 {
                    values[0]
                } else if i == times.len() {
                    values[times.len() - 1]
                } else {
                    let (t0, t1) = (times[i - 1], times[i]);
                    let w = (theta - t0) / (t1 - t0);
                    values[i - 1] * (1.0 - w) + values[i] * w
                }
            }
        }
    }

    fn breaks(&self) -> &[f64] {
        match self {
            Self::Tabulated { times, .. } => times,
            _ => &[],
        }
    }
}

/// `(φ1, φ2, φ3)`: prey, juvenile and mature-predator histories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryFunction {
    pub prey: Profile,
    pub juvenile: Profile,
    pub predator: Profile,
}

impl HistoryFunction {
    pub fn constant(x: f64, y: f64, yj: f64) -> Self {
        Self {
            prey: Profile::Constant { value: x },
            juvenile: Profile::Constant { value: yj },
            predator: Profile::Constant { value: y },
        }
    }

    /// State at `θ` in engine order `[x, y, yj]`.
    pub fn eval(&self, theta: f64) -> [f64; 3] {
        [self.prey.eval(theta), self.predator.eval(theta), self.juvenile.eval(theta)]
    }

    /// Juveniles alive at `t = 0` implied by the prey/predator histories:
    /// `∫_{−τ(φ3(0))}^0 n f(φ1(s), φ3(s)) φ3(s) e^{d_j s} ds`.
    pub fn implied_juveniles(&self, spec: &ModelSpec) -> f64 {
        let p = &spec.params;
        let lo = -spec.delay.tau(self.predator.eval(0.0));
        if lo >= 0.0 {
            return 0.0;
        }
        let mut breaks = vec![lo];
        breaks.extend(
            self.prey
                .breaks()
                .iter()
                .chain(self.predator.breaks())
                .copied()
                .filter(|&t| t > lo && t < 0.0),
        );
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
        quadrature::integrate_with_breaks(
            |s| {
                let x = self.prey.eval(s).max(0.0);
                let y = self.predator.eval(s).max(0.0);
                p.n * spec.response.rate(x, y) * y * (p.dj * s).exp()
            },
            &breaks,
            1e-300,
            1e-12,
        )
        .value
    }

    /// Replaces the juvenile profile by the constant that makes the
    /// history consistent with the maturation integral at `t = 0`.
    pub fn with_consistent_juveniles(mut self, spec: &ModelSpec) -> Self {
        let value = self.implied_juveniles(spec);
        self.juvenile = Profile::Constant { value };
        self
    }

    /// Structural checks plus the consistency warning.
    pub fn check(&self, spec: &ModelSpec) -> HistoryReport {
        const SAMPLES: usize = 513;
        let tau_max = spec.delay.tau_max();
        let mut negative_at = None;
        for i in 0..SAMPLES {
            let theta = -tau_max * (i as f64) / ((SAMPLES - 1) as f64);
            let v = self.eval(theta);
            if v.iter().any(|c| !(*c >= 0.0)) {
                negative_at = Some(theta);
                break;
            }
        }
        let at_zero = self.eval(0.0);
        let implied = self.implied_juveniles(spec);
        let declared = at_zero[2];
        let gap = (declared - implied).abs() / implied.abs().max(f64::MIN_POSITIVE);
        HistoryReport {
            negative_at,
            positive_at_zero: at_zero.iter().all(|&c| c > 0.0),
            declared_juveniles: declared,
            implied_juveniles: implied,
            consistency_gap: gap,
            consistent: gap <= 1e-8,
        }
    }
}

/// Result of [`HistoryFunction::check`]. Inconsistency is a warning only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryReport {
    /// First sampled `θ` where some component is negative.
    pub negative_at: Option<f64>,
    pub positive_at_zero: bool,
    pub declared_juveniles: f64,
    pub implied_juveniles: f64,
    /// Relative gap between declared and implied `φ2(0)`.
    pub consistency_gap: f64,
    pub consistent: bool,
}

impl HistoryReport {
    /// Hard requirements (nonnegativity, positive start). Consistency is
    /// reported separately.
    pub fn is_admissible(&self) -> bool {
        self.negative_at.is_none() && self.positive_at_zero
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DelayFunction, FunctionalResponse, ModelParams};

    fn spec() -> ModelSpec {
        ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.5, dj: 0.4, d: 1.0 },
            delay: DelayFunction::constant(1.2),
            response: FunctionalResponse::HollingII { b: 2.0, h: 0.5 },
        }
    }

    #[test]
    fn constant_history_has_closed_form_juveniles() {
        let s = spec();
        let h = HistoryFunction::constant(1.0, 0.5, 0.1);
        let f = s.response.rate(1.0, 0.5);
        let expect = 1.5 * f * 0.5 * (1.0 - (-0.4f64 * 1.2).exp()) / 0.4;
        assert!((h.implied_juveniles(&s) - expect).abs() < 1e-14);
        let report = h.check(&s);
        assert!(!report.consistent);
        assert!(report.is_admissible());
        let fixed = h.with_consistent_juveniles(&s);
        assert!(fixed.check(&s).consistent);
    }

    #[test]
    fn negative_history_flagged() {
        let s = spec();
        let h = HistoryFunction {
            prey: Profile::Sine { base: 0.1, amplitude: 0.5, omega: 3.0, phase: 0.0 },
            juvenile: Profile::Constant { value: 0.1 },
            predator: Profile::Constant { value: 0.1 },
        };
        assert!(h.check(&s).negative_at.is_some());
    }

    #[test]
    fn tabulated_profile_interpolates() {
        let p = Profile::Tabulated { times: vec![-1.0, 0.0], values: vec![1.0, 3.0] };
        assert_eq!(p.eval(-0.5), 2.0);
        assert_eq!(p.eval(-5.0), 1.0);
        assert_eq!(p.eval(0.0), 3.0);
    }
}
