//! End-to-end tests of the binary: formats, exit codes, determinism, and
//! the reproduce-from-embedded-config contract.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thoma-rsk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn exact_csv_matches_the_measure() {
    let out = run(&[
        "exact", "--alphas", "0.6", "--betas", "0.4", "--n", "2", "--format", "csv",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "partition;probability\n2;0.6\n1,1;0.4\n");

    let out = run(&["exact", "--alphas", "1", "--n", "3", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "partition;probability\n3;1\n");
}

#[test]
fn exact_rejects_sizes_above_the_cap() {
    let out = run(&["exact", "--alphas", "1", "--n", "40"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cap"), "stderr: {err}");
}

#[test]
fn invalid_params_exit_with_config_error() {
    let out = run(&["exact", "--alphas", "0.5", "--betas", "0.2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_is_seed_deterministic() {
    let args = [
        "sample", "--alphas", "0.6", "--betas", "0.4", "--n", "4", "--trials", "500", "--seed",
        "9", "--format", "csv",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    // Zero trials: header only, still success.
    let empty = run(&[
        "sample", "--alphas", "1", "--n", "3", "--trials", "0", "--format", "csv",
    ]);
    assert!(empty.status.success());
    assert_eq!(stdout(&empty), "shape;count;frequency\n");
}

#[test]
fn sample_frequencies_match_the_exact_measure() {
    let out = run(&[
        "sample", "--alphas", "0.6", "--betas", "0.4", "--n", "2", "--trials", "20000", "--seed",
        "3", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text
        .lines()
        .find(|l| l.starts_with("2;"))
        .expect("one-row shape present");
    let freq: f64 = row.split(';').nth(2).unwrap().parse().unwrap();
    // Four binomial standard errors around 0.6 at 20000 trials.
    let se = (0.6f64 * 0.4 / 20000.0).sqrt();
    assert!((freq - 0.6).abs() <= 4.0 * se, "freq {freq}");
}

#[test]
fn params_file_with_flag_overrides() {
    let dir = std::env::temp_dir().join("thoma_rsk_params_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("params.json");
    std::fs::write(&path, r#"{"alphas":[0.6],"betas":[0.4],"gamma":0.0}"#).unwrap();
    let path_str = path.to_str().unwrap();
    let from_file = run(&["exact", "--params", path_str, "--n", "2", "--format", "csv"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), "partition;probability\n2;0.6\n1,1;0.4\n");
    // Flags override individual fields of the file.
    let overridden = run(&[
        "exact", "--params", path_str, "--betas", "0.2", "--gamma", "0.2", "--n", "1", "--format",
        "csv",
    ]);
    assert!(overridden.status.success());
    assert_eq!(stdout(&overridden), "partition;probability\n1;1\n");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seed_env_variable_is_the_fallback() {
    let flagged = run(&[
        "sample", "--alphas", "1", "--n", "5", "--trials", "50", "--seed", "77", "--format", "csv",
    ]);
    let from_env = bin()
        .args(["sample", "--alphas", "1", "--n", "5", "--trials", "50", "--format", "csv"])
        .env("THOMA_RSK_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(stdout(&flagged), stdout(&from_env));
}

#[test]
fn walk_reports_expectation_below_bound() {
    let out = run(&["walk", "--q1", "0.2", "--q3", "0.5", "--n", "1000"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let e = report["expectation"].as_f64().unwrap();
    let bound = report["bound"].as_f64().unwrap();
    assert!(e <= bound);
    assert!((bound - 20.0 / 9.0).abs() < 1e-9);

    let bad = run(&["walk", "--q1", "0.5", "--q3", "0.2", "--n", "10"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn clt_report_reproduces_from_embedded_config() {
    let args = [
        "clt", "--alphas", "1", "--n", "50", "--trials", "100", "-K", "1", "-L", "0", "--seed",
        "5",
    ];
    let first = run(&args);
    assert!(first.status.success(), "deterministic run passes its bands");
    let report: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    let cfg = &report["config"];
    // Rebuild the command line from the echoed configuration.
    let alphas = cfg["alphas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let second = run(&[
        "clt",
        "--alphas",
        &alphas,
        "--order",
        cfg["order"].as_str().unwrap(),
        "--n",
        &report["n"].to_string(),
        "--trials",
        &cfg["trials"].to_string(),
        "-K",
        &cfg["k"].to_string(),
        "-L",
        &cfg["l"].to_string(),
        "--seed",
        &cfg["seed"].to_string(),
    ]);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn drift_and_lln_run_green_on_small_grids() {
    let out = run(&[
        "drift", "--alphas", "0.6", "--betas", "0.4", "--n-grid", "50,100", "--trials", "400",
        "-K", "1", "-L", "1", "--seed", "2", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("pass;true"));

    let out = run(&[
        "lln", "--alphas", "1", "--n-grid", "50,100", "--trials", "100", "-K", "1", "-L", "0",
    ]);
    assert!(out.status.success());
}

#[test]
fn poisson_requires_exactly_one_mode() {
    let out = run(&["poisson", "--alphas", "1", "-K", "1", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let ok = run(&[
        "poisson", "--alphas", "1", "-K", "1", "--trials", "400", "--nu", "50",
    ]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
}

#[test]
fn lemmas_suite_passes_with_small_caps() {
    let out = run(&[
        "lemmas", "--exhaustive-cap", "5", "--trials", "500", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for name in [
        "worked-examples",
        "order-invariance",
        "greene-agreement",
        "insertion-bijection",
        "transpose-duality",
        "amalgamation-dominance",
        "walk-expectation-bound",
        "excess-counts-first-row",
        "restriction-contraction",
        "conditional-gaussian-identity",
    ] {
        assert!(text.contains(&format!("{name};true")), "missing {name}: {text}");
    }
}

#[test]
fn output_file_round_trips_bytes() {
    let dir = std::env::temp_dir().join("thoma_rsk_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("measure.csv");
    let path_str = path.to_str().unwrap();
    let args = [
        "exact", "--alphas", "0.5,0.3", "--betas", "0.2", "--n", "4", "--format", "csv", "--out",
        path_str,
    ];
    let out = run(&args);
    assert!(out.status.success());
    let first = std::fs::read(&path).unwrap();
    let out = run(&args);
    assert!(out.status.success());
    let second = std::fs::read(&path).unwrap();
    assert_eq!(first, second);
    std::fs::remove_dir_all(&dir).ok();
}
