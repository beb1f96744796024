use super::*;
use crate::error::Error;

fn tmp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdecouple-report-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn base_config(command: CommandName) -> ExperimentConfig {
    ExperimentConfig {
        version: 1,
        command,
        fixture: None,
        source: None,
        trials: None,
        seed: None,
        dim: None,
        a_labels: None,
        eps: None,
        delta: None,
        n_qubits: None,
        t_values: None,
        method: None,
        ensemble: None,
        tolerance: None,
        output: None,
        output_csv: None,
        output_plot: None,
    }
}

#[test]
fn config_parsing_is_strict() {
    let ok = ExperimentConfig::from_json(
        r#"{"version": 1, "command": "entropy", "fixture": "bell-identity"}"#,
    )
    .unwrap();
    assert_eq!(ok.command, CommandName::Entropy);

    assert!(matches!(
        ExperimentConfig::from_json(
            r#"{"version": 1, "command": "entropy", "fixture": "bell-identity", "extra": 3}"#
        ),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        ExperimentConfig::from_json(r#"{"version": 2, "command": "entropy", "fixture": "x"}"#),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        ExperimentConfig::from_json(r#"{"version": 1, "command": "frobnicate"}"#),
        Err(Error::Config(_))
    ));
}

#[test]
fn stochastic_commands_require_seed_and_enough_trials() {
    let mut sweep = base_config(CommandName::CircuitSweep);
    sweep.t_values = Some(vec![0, 1]);
    sweep.trials = Some(10);
    assert!(matches!(sweep.validate(), Err(Error::Config(_))));
    sweep.seed = Some(1);
    sweep.validate().unwrap();
    sweep.trials = Some(1);
    assert!(matches!(sweep.validate(), Err(Error::Config(_))));

    let mut dec = base_config(CommandName::DecoupleRun);
    dec.fixture = Some("bell-identity".into());
    dec.source = Some(SourceSpec::Haar);
    dec.trials = Some(10);
    assert!(matches!(dec.validate(), Err(Error::Config(_))));
    dec.source = Some(SourceSpec::Ensemble {
        name: "clifford1q".into(),
    });
    dec.validate().unwrap();
}

#[test]
fn builtin_fixtures_are_valid_instances() {
    for name in fixture_names() {
        let inst = load_fixture(name).unwrap();
        assert!(inst.rho().is_psd(1e-9), "{name}: state not PSD");
        assert!(
            (inst.rho().trace().re - 1.0).abs() < 1e-9,
            "{name}: state not normalized"
        );
        assert!(inst.channel().is_cp(1e-9), "{name}: channel not CP");
        assert!(inst.channel().is_tp(1e-9), "{name}: channel not TP");
    }
    assert!(matches!(
        load_fixture("no-such-fixture"),
        Err(Error::Io { .. })
    ));
}

#[test]
fn custom_fixture_files_roundtrip() {
    let inst = load_fixture("measurement").unwrap();
    let json = FixtureJson::of_instance(&inst);
    let path = tmp_path("fixture.json");
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let loaded = load_fixture(path.to_str().unwrap()).unwrap();
    let dev = (loaded.rho().matrix() - inst.rho().matrix())
        .iter()
        .chain(
            (loaded.channel().to_choi().matrix() - inst.channel().to_choi().matrix()).iter(),
        )
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-12, "fixture roundtrip deviates by {dev}");
}

#[test]
fn entropy_command_reports_the_bell_state_value() {
    let mut config = base_config(CommandName::Entropy);
    config.fixture = Some("bell-identity".into());
    let report = run(&config).unwrap();
    match report.results {
        ReportPayload::Entropy {
            value, upper_bound, ..
        } => {
            assert!((value + 1.0).abs() < 1e-5, "H_min(A|R)_Φ = {value}");
            assert!((upper_bound - 1.0).abs() < 1e-12);
        }
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn design_delta_command_certifies_the_clifford_ensemble() {
    let mut config = base_config(CommandName::DesignDelta);
    config.ensemble = Some("clifford1q".into());
    config.method = Some("choi-trace-bounds".into());
    let report = run(&config).unwrap();
    match report.results {
        ReportPayload::DesignDelta {
            lower,
            upper,
            n_elements,
            ..
        } => {
            assert!(upper <= 1e-9, "Clifford δ upper bound {upper}");
            assert!(lower <= upper);
            assert_eq!(n_elements, Some(24));
        }
        other => panic!("unexpected payload {other:?}"),
    }
    config.method = Some("nonsense".into());
    assert!(matches!(run(&config), Err(Error::Config(_))));
}

#[test]
fn decouple_run_with_clifford_source_is_exact() {
    let mut config = base_config(CommandName::DecoupleRun);
    config.fixture = Some("bell-identity".into());
    config.source = Some(SourceSpec::Ensemble {
        name: "clifford1q".into(),
    });
    config.seed = Some(7);
    let report = run(&config).unwrap();
    match report.results {
        ReportPayload::Decouple(d) => {
            assert!(d.exact_average);
            assert!((d.empirical_mean - 1.5).abs() < 1e-10, "mean {}", d.empirical_mean);
            assert_eq!(d.n_trials, 24);
            assert!((d.bound_haar - 2.0).abs() < 1e-5);
            assert!(d.empirical_mean <= d.bound_approx);
            assert!(d.delta_used <= 1e-9);
            assert_eq!(d.seeds, vec![7]);
            assert!((d.trace_rho - 1.0).abs() < 1e-9);
        }
        other => panic!("unexpected payload {other:?}"),
    }
    // both bounds exceed 1, so the vacuity note must be present
    assert!(report
        .metadata
        .notes
        .iter()
        .any(|n| n.contains("vacuous")));
}

#[test]
fn identity_check_command_matches_the_closed_form() {
    let mut config = base_config(CommandName::IdentityCheck);
    config.dim = Some(2);
    config.trials = Some(200);
    config.seed = Some(1);
    let report = run(&config).unwrap();
    match report.results {
        ReportPayload::IdentityCheck {
            mc_mean,
            closed_form,
            abs_deviation,
            ..
        } => {
            assert!((closed_form - 0.75).abs() < 1e-12);
            assert!((mc_mean - 0.75).abs() < 1e-9);
            assert!(abs_deviation < 1e-9);
        }
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn reports_are_deterministic_given_config_and_seed() {
    let mut config = base_config(CommandName::CircuitSweep);
    config.n_qubits = Some(2);
    config.t_values = Some(vec![0, 2]);
    config.trials = Some(20);
    config.seed = Some(5);
    let a = run(&config).unwrap();
    let b = run(&config).unwrap();
    assert_eq!(
        serde_json::to_string(&a.results).unwrap(),
        serde_json::to_string(&b.results).unwrap()
    );
    assert_eq!(
        serde_json::to_string(&a.config).unwrap(),
        serde_json::to_string(&b.config).unwrap()
    );
}

#[test]
fn json_reports_roundtrip_byte_identically() {
    let mut config = base_config(CommandName::CircuitSweep);
    config.n_qubits = Some(2);
    config.t_values = Some(vec![0, 1, 4]);
    config.trials = Some(12);
    config.seed = Some(9);
    let report = run(&config).unwrap();

    let p1 = tmp_path("report1.json");
    let p2 = tmp_path("report2.json");
    emit_report(&report, ReportFormat::Json, &p1).unwrap();
    let loaded = load_report(&p1).unwrap();
    emit_report(&loaded, ReportFormat::Json, &p2).unwrap();
    assert_eq!(
        std::fs::read_to_string(&p1).unwrap(),
        std::fs::read_to_string(&p2).unwrap()
    );
}

#[test]
fn csv_emission_has_the_sweep_schema() {
    let mut config = base_config(CommandName::CircuitSweep);
    config.n_qubits = Some(2);
    config.t_values = Some(vec![0, 3]);
    config.trials = Some(8);
    config.seed = Some(3);
    let report = run(&config).unwrap();
    let path = tmp_path("sweep.csv");
    emit_report(&report, ReportFormat::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,delta_estimate,stderr,n_samples,seed");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,"));
    assert!(lines[1].ends_with(",8,3"));

    // an empty sweep still gets the header
    let mut empty = report.clone();
    if let ReportPayload::CircuitSweep { rows, .. } = &mut empty.results {
        rows.clear();
    }
    emit_report(&empty, ReportFormat::Csv, &path).unwrap();
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "t,delta_estimate,stderr,n_samples,seed\n"
    );

    // CSV of a non-sweep report is rejected
    let mut entropy = base_config(CommandName::Entropy);
    entropy.fixture = Some("bell-identity".into());
    let er = run(&entropy).unwrap();
    assert!(matches!(
        emit_report(&er, ReportFormat::Csv, &path),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn emitted_numbers_use_twelve_significant_digits() {
    let row = SweepRowRecord {
        t: 1,
        delta_estimate: 0.123456789012345,
        stderr: 1.0 / 3.0,
        n_samples: 4,
        seed: 2,
    };
    let report = ExperimentReport {
        config: base_config(CommandName::CircuitSweep),
        results: ReportPayload::CircuitSweep {
            n_qubits: 2,
            rows: vec![row],
            estimator: "proxy (lower-bound metric)".into(),
        },
        metadata: super::metadata(Vec::new()),
    };
    let path = tmp_path("digits.csv");
    emit_report(&report, ReportFormat::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("0.123456789012"), "csv: {text}");
    assert!(text.contains("0.333333333333"), "csv: {text}");
}

#[test]
fn sweep_plot_is_wellformed_svg_with_markers_and_error_bars() {
    let rows: Vec<SweepRowRecord> = (0..5)
        .map(|k| SweepRowRecord {
            t: k * 5,
            delta_estimate: 0.5 / (k + 1) as f64,
            stderr: if k == 0 { 0.0 } else { 0.01 },
            n_samples: 100,
            seed: 1,
        })
        .collect();
    let path = tmp_path("sweep.svg");
    emit_plot(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    roxmltree::Document::parse(&text).expect("well-formed XML");
    assert_eq!(text.matches("class=\"marker\"").count(), 5);
    // the first row has stderr = 0, so only 4 error bars
    assert_eq!(text.matches("class=\"errorbar\"").count(), 4);

    assert!(matches!(
        emit_plot(&rows[..1], &path),
        Err(Error::Parameter(_))
    ));

    let flat: Vec<SweepRowRecord> = rows
        .iter()
        .map(|r| SweepRowRecord { stderr: 0.0, ..*r })
        .collect();
    emit_plot(&flat, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains("errorbar"));
}

#[test]
fn exit_codes_follow_the_error_taxonomy() {
    assert_eq!(exit_code(&Error::Config("x".into())), 2);
    assert_eq!(exit_code(&Error::Parameter("x".into())), 2);
    assert_eq!(exit_code(&Error::Numeric("x".into())), 3);
    assert_eq!(exit_code(&Error::Violation("x".into())), 4);
    let json: serde_json::Value =
        serde_json::from_str(&Error::Violation("boom".into()).to_json()).unwrap();
    assert_eq!(json["exit_code"], 4);
    assert_eq!(json["error"], "violation");
}
