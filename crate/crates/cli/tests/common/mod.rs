#![allow(dead_code)]

use std::path::PathBuf;

use toruskit_cli::{load_config, ExperimentConfig};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"))
}

pub fn sample_config(name: &str) -> ExperimentConfig {
    load_config(&config_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn files_in(dir: &std::path::Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}
