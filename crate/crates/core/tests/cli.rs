use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};
use std::process::Command as Process;

use serde::de::DeserializeOwned;
use serde::Serialize;

use repeaterlab::cli::{
    main_with, parse_args, run, BasisReport, BoundOutput, CliError, Command, CriterionOutput, MeasurementSource,
    RateReport, SimulateReport, SweepRow,
};
use repeaterlab::repeater::Comparison;

fn ok_report(args: &[&str]) -> String {
    let out = main_with(args.iter().copied());
    assert_eq!(out.exit_code, 0, "{args:?}: {}", out.report);
    out.report
}

fn error_of(args: &[&str]) -> (i32, serde_json::Value) {
    let out = main_with(args.iter().copied());
    assert_ne!(out.exit_code, 0, "{args:?} unexpectedly succeeded");
    let v: serde_json::Value = serde_json::from_str(&out.report).expect("error JSON");
    (out.exit_code, v["error"].clone())
}

/// Parses a report into its schema and checks that reserializing reproduces it.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(text: &str) -> T {
    let parsed: T = serde_json::from_str(text).expect("report schema");
    let again: T = serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, again);
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", text);
    parsed
}

#[test]
fn parse_examples() {
    let cfg = parse_args(["rate", "--theta", "0.5236", "--eta", "0.7854"]).unwrap();
    assert_eq!(cfg.command, Command::Rate);
    assert!((cfg.theta.unwrap() - FRAC_PI_6).abs() < 1e-4);
    assert!((cfg.eta.unwrap() - FRAC_PI_4).abs() < 1e-4);

    let cfg = parse_args(["simulate", "--theta", "0.3", "--eta", "0.6", "--n", "100000", "--seed", "7"]).unwrap();
    assert_eq!((cfg.command, cfg.n_samples, cfg.seed), (Command::Simulate, 100_000, 7));

    let cfg = parse_args(["bound", "--a", "0.5,0.3,0.2", "--b", "0.4,0.35,0.25"]).unwrap();
    assert_eq!(cfg.schmidt_a.unwrap().coefficients(), &[0.5, 0.3, 0.2]);
    assert_eq!(cfg.schmidt_b.unwrap().coefficients(), &[0.4, 0.35, 0.25]);

    let cfg = parse_args(["criterion", "--theta", "0.3", "--eta", "0.6", "--measurement", "bell"]).unwrap();
    assert_eq!(cfg.measurement, Some(MeasurementSource::BuiltIn("bell".into())));

    let cfg = parse_args(["rate", "--theta", "30", "--eta", "45", "--degrees"]).unwrap();
    assert!((cfg.theta.unwrap() - FRAC_PI_6).abs() < 1e-15);
    assert!((cfg.eta.unwrap() - FRAC_PI_4).abs() < 1e-15);

    // angles above π/4 are reflected
    let cfg = parse_args(["rate", "--theta", "1.2", "--eta", "0.4"]).unwrap();
    assert!((cfg.theta.unwrap() - (std::f64::consts::FRAC_PI_2 - 1.2)).abs() < 1e-15);
}

#[test]
fn usage_errors() {
    let (code, e) = error_of(&["rate", "--theta", "0.3", "--eta", "0.4", "--bogus"]);
    assert_eq!((code, e["kind"].as_str()), (2, Some("usage")));
    assert!(e["message"].as_str().unwrap().contains("--bogus"));

    let (code, e) = error_of(&["rate", "--theta", "0.3"]);
    assert_eq!(code, 2);
    assert!(e["message"].as_str().unwrap().contains("--eta"));

    let (code, e) = error_of(&["rate", "--theta", "abc", "--eta", "0.3"]);
    assert_eq!((code, e["kind"].as_str()), (2, Some("usage")));
    assert!(e["message"].as_str().unwrap().contains("--theta"));

    let (_, e) = error_of(&["rate", "--theta", "1.6", "--eta", "0.3"]);
    assert_eq!(e["kind"], "angle_out_of_range");

    let (_, e) = error_of(&["bound", "--a", "0.5,0.4", "--b", "0.5,0.5"]);
    assert_eq!(e["kind"], "invalid_schmidt");

    let (_, e) = error_of(&["criterion", "--theta", "0.3", "--eta", "0.4"]);
    assert!(e["message"].as_str().unwrap().contains("--measurement"));

    let (_, e) = error_of(&["criterion", "--theta", "0.3", "--eta", "0.4", "--measurement", "ghz"]);
    assert_eq!(e["kind"], "usage");

    let (_, e) = error_of(&["sweep", "--steps", "0"]);
    assert_eq!(e["kind"], "usage");

    assert!(matches!(parse_args(["--help"]), Err(CliError::Display(_))));
    assert_eq!(main_with(["--version"]).exit_code, 0);
}

#[test]
fn rate_report() {
    let theta = FRAC_PI_6.to_string();
    let eta = FRAC_PI_4.to_string();
    let text = ok_report(&["rate", "--theta", &theta, "--eta", &eta]);
    let r: RateReport = round_trip(&text);
    assert!((r.p_ms - 0.5).abs() < 1e-12);
    assert_eq!(r.outcomes.len(), 4);
    assert_eq!(r.ledger.classical_bits_sent, 2);
}

#[test]
fn criterion_reports() {
    let text = ok_report(&["criterion", "--measurement", "bell", "--theta", "0.5236", "--eta", "0.7854"]);
    let r: CriterionOutput = round_trip(&text);
    assert!(r.report.optimal);
    let text = ok_report(&["criterion", "--measurement", "computational", "--theta", "0.5", "--eta", "0.6"]);
    let r: CriterionOutput = round_trip(&text);
    assert!(!r.report.optimal);
}

#[test]
fn basis_file_feeds_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis.txt");
    let p = path.to_str().unwrap();
    let out = main_with(["basis", "--theta", "0.3", "--eta", "0.6", "--output", p]);
    assert_eq!(out.exit_code, 0, "{}", out.report);
    assert_eq!(out.written_to.as_deref(), Some(path.as_path()));
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("4 4\n"));

    let text = ok_report(&["criterion", "--theta", "0.3", "--eta", "0.6", "--measurement-file", p]);
    let r: CriterionOutput = round_trip(&text);
    assert!(r.report.optimal);

    let json = ok_report(&["basis", "--theta", "0.3", "--eta", "0.6", "--format", "json"]);
    let b: BasisReport = round_trip(&json);
    assert!((b.probabilities[0] - b.upper_bound).abs() < 1e-12);
    assert!((b.probabilities[1] - b.lower_bound).abs() < 1e-12);

    std::fs::write(&path, "2 2\n1 0 0 0\n0 0 1 0\n").unwrap();
    let (code, e) = error_of(&["criterion", "--theta", "0.3", "--eta", "0.6", "--measurement-file", p]);
    assert_eq!((code, e["kind"].as_str()), (2, Some("dimension_mismatch")));

    let missing = dir.path().join("missing.txt");
    let (code, e) = error_of(&["criterion", "--theta", "0.3", "--eta", "0.6", "--measurement-file", missing.to_str().unwrap()]);
    assert_eq!((code, e["kind"].as_str()), (1, Some("io")));
}

#[test]
fn bound_simulate_compare_reports() {
    let text = ok_report(&["bound", "--a", "0.5,0.3,0.2", "--b", "0.4,0.35,0.25"]);
    let r: BoundOutput = round_trip(&text);
    assert!((r.result.achieved_p - r.result.p_max).abs() < 1e-10);

    let text = ok_report(&["simulate", "--theta", "0.3", "--eta", "0.6", "--n", "20000", "--seed", "7"]);
    let r: SimulateReport = round_trip(&text);
    assert_eq!(r.sampled.seed, 7);
    assert!(r.z_score.abs() < 4.0);

    let text = ok_report(&["compare", "--theta", "0.3", "--eta", "0.6"]);
    let c: Comparison = round_trip(&text);
    assert!(c.optimal.ledger.bob_acts_probability < c.bell.ledger.bob_acts_probability);

    let csv = ok_report(&["compare", "--theta", "0.3", "--eta", "0.6", "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("theta,eta,optimal_p_ms"));
}

#[test]
fn config_file_supplies_states() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pairs.json");
    std::fs::write(&path, r#"{"left": {"angle": 0.5235987755982988}, "right": {"schmidt": [0.5, 0.5]}}"#).unwrap();
    let p = path.to_str().unwrap();
    let r: RateReport = round_trip(&ok_report(&["rate", "--config", p]));
    assert!((r.p_ms - 0.5).abs() < 1e-12);
    let b: BoundOutput = round_trip(&ok_report(&["bound", "--config", p]));
    assert!((b.result.p_max - 0.1875).abs() < 1e-12);

    std::fs::write(&path, r#"{"left": {"angle": 0.3}, "middle": 1}"#).unwrap();
    let (_, e) = error_of(&["rate", "--config", p]);
    assert_eq!(e["kind"], "config");
}

#[test]
fn sweep_csv_shape_and_monotonicity() {
    let csv = ok_report(&["sweep", "--steps", "20"]);
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["theta", "eta", "p_ms", "p_direct", "bound_lower", "bound_upper", "p_max", "bob_acts_optimal", "bob_acts_bell"]
    );
    let rows: Vec<SweepRow> = reader.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 400);
    assert_eq!(csv.lines().count(), 401);
    for i in 0..20 {
        for j in 0..20 {
            let r = &rows[20 * i + j];
            if j + 1 < 20 {
                assert!(rows[20 * i + j + 1].p_ms >= r.p_ms - 1e-12, "η direction at ({i}, {j})");
                assert_eq!(rows[20 * i + j + 1].theta, r.theta);
            }
            if i + 1 < 20 {
                assert!(rows[20 * (i + 1) + j].p_ms >= r.p_ms - 1e-12, "θ direction at ({i}, {j})");
            }
            assert!(r.bob_acts_optimal <= r.bob_acts_bell + 1e-12);
        }
    }

    let json = ok_report(&["sweep", "--steps", "4", "--format", "json"]);
    let rows: Vec<SweepRow> = round_trip(&json);
    assert_eq!(rows.len(), 16);
}

#[test]
fn run_reports_output_failures() {
    let mut cfg = parse_args(["rate", "--theta", "0.3", "--eta", "0.6"]).unwrap();
    cfg.output_path = Some("/nonexistent-dir/report.json".into());
    let out = run(&cfg);
    assert_eq!(out.exit_code, 1);
    assert!(out.report.contains("\"io\""));
}

#[test]
fn binary_uses_seed_from_environment() {
    let bin = env!("CARGO_BIN_EXE_repeaterlab");
    let go = |seed: &str| {
        let out = Process::new(bin)
            .args(["simulate", "--theta", "0.3", "--eta", "0.6", "--n", "5000"])
            .env("REPEATERLAB_SEED", seed)
            .output()
            .unwrap();
        assert!(out.status.success());
        serde_json::from_slice::<SimulateReport>(&out.stdout).unwrap()
    };
    let a = go("11");
    assert_eq!(a.sampled.seed, 11);
    assert_eq!(a, go("11"));

    let out = Process::new(bin).args(["rate", "--theta", "9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"]["kind"].is_string());
}
