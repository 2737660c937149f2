//! Monte Carlo harness for `contreg-core`: experiment configs, CSV results,
//! rate fits, lower-bound runs and verification suites.

pub mod adversarial;
pub mod config;
mod error;
pub mod experiment;
pub mod fit;
pub mod verify;

pub use adversarial::{any_algorithm_trial, builtin_methods, seen_task_trial, AdversarialReport, Method, ScenarioName};
pub use config::{ExperimentConfig, Init, ScheduleConfig, SchemeName};
pub use error::{HarnessError, Result};
pub use experiment::{aggregate, read_csv, run_experiment, run_on_collection, write_csv, Aggregate, Metric, ResultRow};
pub use fit::{fit_rate, RateFit};
pub use verify::{verify_suite, Check, Suite, SuiteReport};
