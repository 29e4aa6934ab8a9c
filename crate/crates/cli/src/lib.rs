//! Configuration, orchestration, persistence and reporting for the
//! first-passage percolation laboratory, plus the acceptance suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod report;
pub mod runner;

pub use config::{parse_config, Experiment, ExperimentConfig};
pub use error::{exit, CliError, Result};
pub use manifest::{parse_manifest, RunManifest};
pub use report::render_report;
pub use runner::{replay, run, RunOutcome};
