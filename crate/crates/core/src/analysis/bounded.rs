use serde::Serialize;

use super::{tail_nodes, AnalysisError};
use crate::engine::Trajectory;
use crate::model::ModelSpec;

/// Tail statistics of `V = n x + y + yj` against its a-priori bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundednessCertificate {
    /// `max_x [n (m + r) x − (n r / K) x²] = n K (m + r)² / (4 r)` with
    /// `m = min(d_j, d)`.
    pub m_bound: f64,
    /// `m_bound / m`.
    pub v_limit: f64,
    pub observed_v_sup: f64,
    pub observed_x_sup: f64,
    pub tail_start: f64,
}

impl BoundednessCertificate {
    /// `sup V ≤ v_limit (1 + tol)` and `sup x ≤ K (1 + tol)`.
    pub fn holds(&self, k: f64, tol: f64) -> bool {
        self.observed_v_sup <= self.v_limit * (1.0 + tol) && self.observed_x_sup <= k * (1.0 + tol)
    }
}

/// Scans the last `tail_fraction` of the trajectory; the window must span
/// at least `10 τ_M`.
pub fn boundedness_certificate(
    spec: &ModelSpec,
    traj: &Trajectory,
    tail_fraction: f64,
) -> Result<BoundednessCertificate, AnalysisError> {
    let p = &spec.params;
    let window = tail_fraction.clamp(0.0, 1.0) * traj.t_end();
    let needed = 10.0 * spec.delay.tau_max();
    if window < needed {
        return Err(AnalysisError::InsufficientHorizon { window, needed });
    }
    let m = p.dj.min(p.d);
    let m_bound = p.n * p.k * (m + p.r).powi(2) / (4.0 * p.r);
    let range = tail_nodes(traj, tail_fraction);
    let tail_start = traj.dense().times()[range.start];
    let (mut v_sup, mut x_sup) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for u in &traj.dense().values()[range] {
        v_sup = v_sup.max(p.n * u[0] + u[1] + u[2]);
        x_sup = x_sup.max(u[0]);
    }
    Ok(BoundednessCertificate { m_bound, v_limit: m_bound / m, observed_v_sup: v_sup, observed_x_sup: x_sup, tail_start })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{integrate, StepperConfig};
    use crate::model::{DelayFunction, FunctionalResponse, HistoryFunction, ModelParams};

    #[test]
    fn prey_only_settles_at_capacity() {
        let spec = ModelSpec {
            params: ModelParams { r: 1.0, k: 3.0, n: 1.0, dj: 0.6, d: 0.6 },
            delay: DelayFunction::constant(1.0),
            response: FunctionalResponse::Linear { b: 0.0 },
        };
        let h = HistoryFunction::constant(0.5, 0.4, 0.0);
        let traj = integrate(&spec, &h, &StepperConfig::new(60.0)).unwrap();
        let c = boundedness_certificate(&spec, &traj, 0.25).unwrap();
        assert!((c.v_limit - 3.0 * 1.6f64.powi(2) / (4.0 * 0.6)).abs() < 1e-12);
        assert!(c.holds(3.0, 1e-9));
        assert!((c.observed_x_sup - 3.0).abs() < 1e-6);
        assert!(boundedness_certificate(&spec, &traj, 0.1).is_err());
    }
}
