mod common;

use std::process::Command;

use common::*;

fn toruskit(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_toruskit"))
        .args(args)
        .env_remove("TORUSKIT_CACHE")
        .output()
        .unwrap()
}

#[test]
fn successful_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_path("chain_scaling");
    let out = toruskit(&["chains", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PASS slope_bound"));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    // threshold 0 makes the cluster {0, ±e_i, ...} around the origin count as non-dyadic
    std::fs::write(
        &cfg,
        "kind = \"cluster\"\n[lattice]\ndim = 2\n[cluster]\nradius = 8\ndelta = 0.1\npolicy = \"exploratory\"\ndyadic_threshold = 0\n",
    )
    .unwrap();
    let out = toruskit(&["cluster", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL dyadicity"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "kind = \"singular\"\n[frequency]\nmass = \"3/\"\n").unwrap();
    let cfg = config_path("chain_scaling");
    let o = dir.path().join("o");
    for args in [
        vec!["chains"],
        vec!["frobnicate", "--config", cfg.to_str().unwrap()],
        vec!["singular", "--config", bad.to_str().unwrap()],
        vec!["cluster", "--config", cfg.to_str().unwrap(), "--out-dir", o.to_str().unwrap()],
        vec!["chains", "--config", "/nonexistent/x.toml"],
    ] {
        let out = toruskit(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = toruskit(&["singular", "--config", bad.to_str().unwrap()]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
}

#[test]
fn seed_flag_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_path("homological");
    let out = toruskit(&["homological", "--config", cfg.to_str().unwrap(), "--seed", "99", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let echoed = toruskit_cli::load_config(&dir.path().join("config.toml")).unwrap();
    assert_eq!(echoed.seed, 99);
}
