//! Scenario runner and validation harness for `velopaoi-core`.
//!
//! Each run evaluates an analytical curve and its Monte Carlo reference for
//! one scenario and writes both as CSV. `validate` runs the full acceptance
//! suite and reports one pass/fail row per criterion.

pub mod config;
pub mod error;
pub mod output;
pub mod runs;
pub mod validate;

pub use config::{Command, CorrelationForm, Scenario};
pub use error::CliError;
pub use output::{CurvePair, CurvePoint, CurveSeries};
pub use runs::{run_correlation, run_handover_check, run_joint, run_meta, run_paoi, Analysis};
pub use validate::{Budget, CriterionReport, Status, Validator};
