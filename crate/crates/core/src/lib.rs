//! Continual linear regression under random task orderings.
//!
//! The crate covers the three continual update rules (explicit ridge
//! regularization toward the previous iterate, a finite budget of gradient
//! steps, and train-to-convergence projection), their rewriting as single
//! incremental gradient steps on quadratic surrogates, the regularization
//! schedules with their constants, task orderings, evaluation metrics and the
//! lower-bound task constructions.
//!
//! Everything here is `no_std` + `alloc`. IO, configuration and the Monte
//! Carlo harness live in the `contreg` crate.

#![no_std]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod adversarial;
mod error;
pub mod linalg;
pub mod metrics;
pub mod ordering;
pub mod schedules;
pub mod schemes;
pub mod surrogate;
pub mod task;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};

pub use adversarial::{any_alg_lb_collection, seen_task_lb_collection, AdversarialScenario};
pub use metrics::{average_loss, loss_degradation, seen_task_loss, MetricsRecord};
pub use ordering::{sample_ordering, Ordering, OrderingKind, Seed};
pub use schedules::{
    certificate_check, fixed_budget, fixed_coefficient, increasing_budget, increasing_coefficient,
    linear_decay_steps, CertificateReport, Schedule, ScheduleKind, StepParams, Strengths,
};
pub use schemes::{
    budgeted_step, igd_step, regularized_step, run_continual, unregularized_step, SchemeKind,
    StepRecord, Trajectory,
};
pub use surrogate::{
    build_budgeted_surrogate, build_regularized_surrogate, build_spectral_surrogate,
    sandwich_check, sandwich_check_with, value_and_grad, RadiusScale, SandwichReport, SpectralMap,
    SurrogateKind, SurrogateQuadratic,
};
pub use task::{generate_realizable, radius, RealizableSpec, RegressionTask, TaskCollection};
