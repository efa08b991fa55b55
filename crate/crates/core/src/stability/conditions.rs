use serde::Serialize;

use super::StabilityError;
use crate::equilibria::{Equilibrium, EquilibriumKind};
use crate::model::{FunctionalResponse, ModelSpec};

/// Signed margins; each condition holds iff its margin is positive
/// (`death_rates` iff nonnegative).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margins {
    /// `R − 1`.
    pub permanence: f64,
    /// `d_j − d`.
    pub death_rates: f64,
    /// `k2 − 2 (n b E0 − d k1) / (n r E0)`, `E0 = e^{−d_j τ(0)}`.
    pub k2_local: f64,
    /// `k2 − b K Q / (r (Q K − d))`, `Q = n b E* − d k1`,
    /// `E* = e^{−d_j τ(y*)}`.
    pub k2_prey_scale: f64,
    /// `k2 − b K Q / (r d)`.
    pub k2_recruitment: f64,
    /// `k2 − b / r`.
    pub k2_handling: f64,
    /// `n b E* K / (1 + k1 K) − d`.
    pub capacity_recruitment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    /// Hypotheses of the local stability result: permanence, `d ≤ d_j` and
    /// the `k2_local` bound.
    #[serde(rename = "thm7")]
    pub local_stability: bool,
    /// Hypotheses of the global attraction result: `capacity_recruitment`
    /// and the three `k2` bounds.
    #[serde(rename = "thm8")]
    pub global_attraction: bool,
    pub margins: Margins,
}

impl ConditionReport {
    pub fn all(&self) -> bool {
        self.local_stability && self.global_attraction
    }
}

/// Evaluates the explicit sufficient conditions for a Beddington–DeAngelis
/// coexistence point.
pub fn check_global_conditions(spec: &ModelSpec, eq: &Equilibrium) -> Result<ConditionReport, StabilityError> {
    let FunctionalResponse::BeddingtonDeAngelis { b, k1, k2 } = spec.response else {
        return Err(StabilityError::NotBeddingtonDeAngelis(spec.response.kind_name()));
    };
    if eq.kind != EquilibriumKind::Coexistence {
        return Err(StabilityError::NotCoexistence);
    }
    let p = &spec.params;
    let e0 = spec.survival(spec.delay.tau(0.0));
    let es = spec.survival(spec.delay.tau(eq.y));
    let q = p.n * b * es - p.d * k1;
    let prey_scale = if q * p.k - p.d > 0.0 { b * p.k * q / (p.r * (q * p.k - p.d)) } else { f64::INFINITY };
    let margins = Margins {
        permanence: spec.reproduction_number() - 1.0,
        death_rates: p.dj - p.d,
        k2_local: k2 - 2.0 * (p.n * b * e0 - p.d * k1) / (p.n * p.r * e0),
        k2_prey_scale: k2 - prey_scale,
        k2_recruitment: k2 - b * p.k * q / (p.r * p.d),
        k2_handling: k2 - b / p.r,
        capacity_recruitment: p.n * b * es * p.k / (1.0 + k1 * p.k) - p.d,
    };
    let local_stability = margins.permanence > 0.0 && margins.death_rates >= 0.0 && margins.k2_local > 0.0;
    let global_attraction = margins.capacity_recruitment > 0.0
        && margins.k2_prey_scale > 0.0
        && margins.k2_recruitment > 0.0
        && margins.k2_handling > 0.0;
    Ok(ConditionReport { local_stability, global_attraction, margins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::solve_coexistence;
    use crate::model::{DelayFunction, ModelParams};

    fn spec(k2: f64, d: f64, dj: f64) -> ModelSpec {
        ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj, d },
            delay: DelayFunction::saturating(0.5, 1.0, 2.0),
            response: FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1: 0.0, k2 },
        }
    }

    #[test]
    fn tuned_fixture_passes() {
        let s = spec(10.0, 0.2, 0.5);
        let eq = solve_coexistence(&s).unwrap();
        let rep = check_global_conditions(&s, &eq).unwrap();
        assert!(rep.all(), "{rep:?}");
    }

    #[test]
    fn small_k2_fails_handling_term() {
        let s = spec(0.5, 0.2, 0.5);
        let eq = solve_coexistence(&s).unwrap();
        let rep = check_global_conditions(&s, &eq).unwrap();
        assert!(rep.margins.k2_handling < 0.0);
        assert!(!rep.global_attraction);
    }

    #[test]
    fn death_rate_order_flagged() {
        let s = spec(40.0, 0.3, 0.2);
        let eq = solve_coexistence(&s).unwrap();
        let rep = check_global_conditions(&s, &eq).unwrap();
        assert!(rep.global_attraction);
        assert!(!rep.local_stability);
        assert!(rep.margins.death_rates < 0.0);
    }
}
