//! Forward integration of the model by the method of steps.

mod dense;
mod stepper;
mod system;
mod trajectory;

use thiserror::Error;

pub use dense::{hermite, DenseOutput};
pub use stepper::{integrate_system, DelaySystem, EngineError, StepperConfig};
pub use system::{rhs, Rates, State};
pub use trajectory::Trajectory;

use crate::model::{HistoryFunction, ModelSpec};
use system::ModelSystem;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LookupError {
    #[error("time {t} outside the covered interval [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Error)]
pub enum IntegrationError {
    #[error("invalid stepper configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid history: {0}")]
    InvalidHistory(String),
    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64, partial: Box<Trajectory> },
    #[error("component {component} reached {value} at t = {t}, below the positivity guard")]
    Positivity { t: f64, component: usize, value: f64, partial: Box<Trajectory> },
    #[error("lagged time {s} requested at t = {t} lies before the history interval")]
    LagOutOfRange { t: f64, s: f64 },
}

impl IntegrationError {
    /// Solution up to the failure point, when one exists.
    pub fn partial(&self) -> Option<&Trajectory> {
        match self {
            Self::StepUnderflow { partial, .. } | Self::Positivity { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

/// Integrates the model from `history` up to `cfg.t_end`.
///
/// When `τ_m > 0` the step is capped at `0.999 τ_m` regardless of
/// `cfg.h_max`, so lagged times always fall on already accepted steps.
pub fn integrate(spec: &ModelSpec, history: &HistoryFunction, cfg: &StepperConfig) -> Result<Trajectory, IntegrationError> {
    let h0 = history.eval(0.0);
    if let Some(i) = h0.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(IntegrationError::InvalidHistory(format!("component {i} at 0 is {}", h0[i])));
    }
    let sys = ModelSystem::new(spec, history);
    match integrate_system(&sys, cfg) {
        Ok(dense) => Ok(Trajectory::assemble(spec, history, dense, sys.min_correction.get())),
        Err(e) => {
            let min_corr = sys.min_correction.get();
            Err(match e {
                EngineError::InvalidConfig(m) => IntegrationError::InvalidConfig(m),
                EngineError::LagOutOfRange { t, s } => IntegrationError::LagOutOfRange { t, s },
                EngineError::StepUnderflow { t, h, partial } => IntegrationError::StepUnderflow {
                    t,
                    h,
                    partial: Box::new(Trajectory::assemble(spec, history, *partial, min_corr)),
                },
                EngineError::Positivity { t, component, value, partial } => IntegrationError::Positivity {
                    t,
                    component,
                    value,
                    partial: Box::new(Trajectory::assemble(spec, history, *partial, min_corr)),
                },
            })
        }
    }
}
