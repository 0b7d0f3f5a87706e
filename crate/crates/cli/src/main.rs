use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toruskit_cli::config::{load_config, ExperimentKind};
use toruskit_cli::runner::{run_experiment_with, RunOptions, REPORT_FILE};
use toruskit_cli::store::Cache;

#[derive(Parser)]
#[command(name = "toruskit", version, about = "Run toruskit experiments from a TOML config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Eigenvalue clusters and their separation properties.
    Cluster,
    /// Longest Gamma-chains of lattice eigenvalues against Gamma.
    Chains,
    /// Singular sites and chain bounds for the NLW/NLS symbols.
    Singular,
    /// Excluded measure of the frequency-scaling interval against gamma.
    Measure,
    /// Homological equation on a random off-diagonal matrix.
    Homological,
    /// Randomised checks of the compound-matrix and covering identities.
    Verify,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::Cluster => ExperimentKind::Cluster,
            Command::Chains => ExperimentKind::Chains,
            Command::Singular => ExperimentKind::Singular,
            Command::Measure => ExperimentKind::Measure,
            Command::Homological => ExperimentKind::Homological,
            Command::Verify => ExperimentKind::Verify,
        }
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = cli.config else {
        return usage_error("--config <path> is required");
    };
    let mut config = match load_config(&path) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let kind = cli.command.kind();
    if config.kind != kind {
        return usage_error(format!(
            "config kind is {:?} but the subcommand is {:?}",
            config.kind.name(),
            kind.name()
        ));
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return usage_error(format!("cannot set up {n} threads: {e}"));
        }
    }
    let opts = RunOptions {
        out_dir: cli.out_dir.unwrap_or_else(|| config.output.dir.clone()),
        cache: Cache::from_env(),
    };
    let report = match run_experiment_with(&config, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for c in &report.body.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.invariant);
    }
    for (k, v) in &report.body.fitted {
        println!("  {k} = {v}");
    }
    println!(
        "report: {} ({:.2} s)",
        opts.out_dir.join(REPORT_FILE).display(),
        report.wall_time_s
    );
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
