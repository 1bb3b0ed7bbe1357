//! Configuration, sweeps, validation runs and CSV output for the `tricoh`
//! command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;
pub mod validate;

pub use config::{Axis, GeometryChoice, Output, RunConfig};
pub use error::CliError;
pub use run::{run_point, run_sweep, ResultRow, SweepReport};
pub use validate::{run_validate, validate_single, ValidationReport};
