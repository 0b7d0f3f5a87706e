use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{ConfigError, ExperimentConfig};
use crate::experiments;
use crate::plot::{emit_plot_data, PlotError};
use crate::report::{OutputFile, ReportBody, RunReport};
use crate::store::{sha256_hex, write_atomic, Cache};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] toruskit::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 1 for a failed mathematical assertion inside a module, 2 for anything the user must fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(toruskit::Error::IdentityViolation { .. }) => 1,
            RunError::Core(toruskit::Error::SearchTruncated { .. }) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub cache: Cache,
}

impl RunOptions {
    /// Output directory from the config, cache from `TORUSKIT_CACHE`.
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            out_dir: config.output.dir.clone(),
            cache: Cache::from_env(),
        }
    }
}

pub const REPORT_FILE: &str = "report.json";
pub const CONFIG_FILE: &str = "config.toml";

/// Runs with the config's own output directory and the environment cache.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, RunError> {
    run_experiment_with(config, &RunOptions::from_config(config))
}

/// Runs the experiment, writes `config.toml`, the selected CSV series and `report.json`
/// into `opts.out_dir`, and returns the report.
pub fn run_experiment_with(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, RunError> {
    config.validate()?;
    let start = Instant::now();
    let outcome = experiments::run(config, &opts.cache)?;
    let mut report = RunReport {
        body: ReportBody {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: config.kind,
            seed: config.seed,
            config: config.clone(),
            passed: outcome.checks.iter().all(|c| c.passed),
            checks: outcome.checks,
            fitted: outcome.fitted,
            series: outcome.series,
            data: serde_json::Value::Object(outcome.data),
            outputs: Vec::new(),
        },
        wall_time_s: 0.0,
    };

    let dir = opts.out_dir.as_path();
    let mut outputs = vec![write_file(dir, CONFIG_FILE, config.to_toml().as_bytes())?];
    outputs.extend(emit_plot_data(&report, config.output.series.as_deref(), dir)?);
    report.body.outputs = outputs;
    report.wall_time_s = start.elapsed().as_secs_f64();
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&dir.join(REPORT_FILE), text.as_bytes())?;
    Ok(report)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<OutputFile> {
    write_atomic(&dir.join(name), bytes)?;
    Ok(OutputFile {
        path: name.to_string(),
        sha256: sha256_hex(bytes),
    })
}
