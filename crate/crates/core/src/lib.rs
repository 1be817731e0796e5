//! Contact Hamiltonian dynamics.
//!
//! Equations of motion for a contact Hamiltonian `K(q, p, z)` with an
//! integration factor `lambda`, the contact Poisson bracket, an explicit
//! hybrid leap-frog integrator, a small model zoo of dissipative systems and
//! trajectory diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bracket;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod integrator;
pub mod models;
pub mod sampling;
pub mod state;
pub mod system;

pub use bracket::{contact_bracket, observable_rate, Observable, Polynomial};
pub use error::{ContactError, Result};
pub use field::{contact_vector_field, k_rate_identity, lifted_vector_field, StateDerivative};
pub use integrator::{
    analytic_damped_ho, convergence_order, hybrid_leapfrog_step, integrate, rk4_reference_step,
    IntegrationError, IntegratorConfig, Scheme, Trajectory,
};
pub use models::{default_experiment, default_experiments, Experiment, Model, ModelKind, ModelSpec};
pub use state::{ContactState, LiftedState};
pub use system::{ContactSystem, FnSystem};
