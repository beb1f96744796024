use std::path::PathBuf;
use std::process::{Command, Output};

fn qdecouple(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdecouple"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tmp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdecouple-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn decouple_run_clifford_fixture_reports_exact_mean() {
    let out = qdecouple(&[
        "decouple-run",
        "--fixture",
        "bell-identity",
        "--source",
        "clifford1q",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    let results = &json["results"];
    assert_eq!(results["kind"], "decouple");
    assert_eq!(results["exact_average"], true);
    let mean = results["empirical_mean"].as_f64().unwrap();
    assert!((mean - 1.5).abs() < 1e-10, "mean {mean}");
}

#[test]
fn identity_check_matches_the_closed_form() {
    let out = qdecouple(&["identity-check", "--d", "2", "--trials", "200", "--seed", "1"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["results"]["kind"], "identity-check");
    let closed = json["results"]["closed_form"].as_f64().unwrap();
    assert!((closed - 0.75).abs() < 1e-12);
}

#[test]
fn missing_seed_is_an_invalid_config() {
    let out = qdecouple(&["identity-check", "--d", "2", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert_eq!(err["error"], "config");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn single_trial_monte_carlo_is_rejected() {
    let out = qdecouple(&[
        "decouple-run",
        "--fixture",
        "bell-identity",
        "--source",
        "haar",
        "--trials",
        "1",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_runs_and_unknown_fields_are_rejected() {
    let path = tmp_path("config.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "command": "entropy", "fixture": "bell-identity"}"#,
    )
    .unwrap();
    let out = qdecouple(&["--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    let value = json["results"]["value"].as_f64().unwrap();
    assert!((value + 1.0).abs() < 1e-5, "H_min {value}");

    std::fs::write(
        &path,
        r#"{"version": 1, "command": "entropy", "fixture": "bell-identity", "bogus": 1}"#,
    )
    .unwrap();
    let out = qdecouple(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn circuit_sweep_writes_csv_and_svg() {
    let csv = tmp_path("sweep.csv");
    let svg = tmp_path("sweep.svg");
    let out = qdecouple(&[
        "circuit-sweep",
        "--n-qubits",
        "2",
        "--t-values",
        "0,2",
        "--trials",
        "16",
        "--seed",
        "11",
        "--output-csv",
        csv.to_str().unwrap(),
        "--output-plot",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("t,delta_estimate,stderr,n_samples,seed\n"));
    assert_eq!(csv_text.lines().count(), 3);
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    roxmltree::Document::parse(&svg_text).expect("well-formed SVG");

    // determinism: the same invocation yields byte-identical results JSON
    let rerun = qdecouple(&[
        "circuit-sweep",
        "--n-qubits",
        "2",
        "--t-values",
        "0,2",
        "--trials",
        "16",
        "--seed",
        "11",
    ]);
    let a = stdout_json(&out);
    let b = stdout_json(&rerun);
    assert_eq!(a["results"], b["results"]);
}

#[test]
fn design_delta_certifies_clifford() {
    let out = qdecouple(&[
        "design-delta",
        "--ensemble",
        "clifford1q",
        "--method",
        "choi-trace-bounds",
    ]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert!(json["results"]["upper"].as_f64().unwrap() <= 1e-9);
}
