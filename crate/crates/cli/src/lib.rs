//! Configuration, dispatch, and reporting for `urn` experiments.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ConfigError, Experiment, ExperimentConfig, RawConfig};
pub use report::ExperimentReport;
pub use run::{run, RunError, RunOutcome};
