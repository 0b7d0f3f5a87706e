//! Config-driven experiments over the `toruskit` modules, with reproducible JSON reports.
//!
//! A run loads a TOML [`config::ExperimentConfig`], dispatches on its `kind`, and
//! writes `config.toml`, one CSV per data series and `report.json` atomically into the
//! output directory. The report body is a pure function of the config and seed.

pub mod config;
mod experiments;
pub mod plot;
pub mod report;
pub mod runner;
pub mod store;

pub use config::{load_config, parse_config, ConfigError, ExperimentConfig, ExperimentKind, ParseError, ValidationError};
pub use plot::{emit_plot_data, PlotError};
pub use report::{Check, ReportBody, RunReport, Series};
pub use runner::{run_experiment, run_experiment_with, RunError, RunOptions};
pub use store::Cache;
