//! Stage-structured predator-prey dynamics with a maturation delay that
//! depends on the mature-predator density.
//!
//! * [`model`]: parameters, delay laws, functional responses, histories and
//!   hypothesis validation.
//! * [`engine`]: method-of-steps integrator with dense output.
//! * [`equilibria`]: boundary and coexistence steady states.
//! * [`stability`]: linearization, characteristic roots and the quartic
//!   positive-root test.
//! * [`analysis`]: trajectory-level probes of boundedness, persistence and
//!   global attraction.

// `!(v > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod engine;
pub mod equilibria;
pub mod model;
pub mod quadrature;
pub mod roots;
pub mod stability;

pub use engine::{integrate, IntegrationError, State, StepperConfig, Trajectory};
pub use equilibria::{boundary_equilibria, solve_coexistence, Equilibrium, EquilibriumKind};
pub use model::{DelayFunction, FunctionalResponse, HistoryFunction, ModelParams, ModelSpec};
