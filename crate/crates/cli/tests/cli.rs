//! End-to-end checks of the command-line surface: output determinism, JSON
//! schema round-trips, config overlays and exit codes.

use std::io::Write;
use std::path::PathBuf;

use reclab_cli::{run_cli_to, EXIT_HORIZON, EXIT_OK, EXIT_PRECONDITION};
use reclab_core::bounds::{BoundReport, FinitenessVerdict};
use reclab_core::ensemble::EnsembleSummary;
use reclab_core::geometry::CoveringReport;
use reclab_core::spectral::MomentSummary;
use reclab_core::timing::TimingCertificate;

fn run(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["reclab"];
    argv.extend_from_slice(args);
    let mut buffer = Vec::new();
    let code = run_cli_to(argv, &mut buffer);
    (code, String::from_utf8(buffer).unwrap())
}

fn two_level_file() -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::with_suffix(".json").unwrap();
    file.write_all(
        br#"{"eigenvalues": [-1.0, 1.0],
            "amplitudes": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]]}"#,
    )
    .unwrap();
    file.flush().unwrap();
    file
}

/// Strips the human-readable lines preceding the JSON document.
fn json_part(output: &str) -> &str {
    let start = output.find("{\n").expect("no JSON document in output");
    &output[start..]
}

#[test]
fn exit_command_prints_certificate_and_is_deterministic() {
    let state = two_level_file();
    let path = state.path().to_str().unwrap();
    let (code, output) = run(&["exit", "--state", path, "--epsilon", "0.1"]);
    assert_eq!(code, EXIT_OK);
    assert!(output.starts_with("t_exit = 0.100167421\n"), "{output}");
    let cert: TimingCertificate = serde_json::from_str(json_part(&output)).unwrap();
    assert!((cert.t_exit.unwrap() - 0.1f64.asin()).abs() < 1e-8);

    let (code2, output2) = run(&["exit", "--state", path, "--epsilon", "0.1"]);
    assert_eq!(code2, EXIT_OK);
    assert_eq!(output, output2, "output must be byte-identical across runs");
}

#[test]
fn recur_reports_recurrences_and_round_trips() {
    let state = two_level_file();
    let path = state.path().to_str().unwrap();
    let (code, output) = run(&["recur", "--state", path, "--epsilon", "0.1", "--k", "2"]);
    assert_eq!(code, EXIT_OK);
    let cert: TimingCertificate = serde_json::from_str(json_part(&output)).unwrap();
    assert_eq!(cert.recurrences.len(), 2);
    let reserialized = serde_json::to_string(&cert).unwrap();
    let again: TimingCertificate = serde_json::from_str(&reserialized).unwrap();
    assert_eq!(cert, again);
}

#[test]
fn moments_bounds_finite_round_trip() {
    let state = two_level_file();
    let path = state.path().to_str().unwrap();

    let (code, output) = run(&["moments", "--state", path]);
    assert_eq!(code, EXIT_OK);
    let m: MomentSummary = serde_json::from_str(json_part(&output)).unwrap();
    assert!((m.variance - 1.0).abs() < 1e-12);

    let (code, output) = run(&["bounds", "--state", path, "--epsilon", "0.1", "--k", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(output.contains("mt_lower"), "{output}");
    assert!(output.contains("thm1_rec_upper"));
    let report: BoundReport = serde_json::from_str(json_part(&output)).unwrap();
    assert!((report.mt_lower.unwrap() - 0.1f64.asin()).abs() < 1e-12);
    assert!(report.kth_rec_upper.is_some());

    let (code, output) = run(&["finite", "--state", path, "--epsilon", "0.5"]);
    assert_eq!(code, EXIT_OK);
    let verdict: FinitenessVerdict = serde_json::from_str(json_part(&output)).unwrap();
    assert!(verdict.finite);
}

#[test]
fn cover_check_and_diamond_commands() {
    let state = two_level_file();
    let path = state.path().to_str().unwrap();
    let (code, output) = run(&[
        "cover-check",
        "--epsilon",
        "0.5",
        "--dim",
        "2",
        "--flavor",
        "state",
        "--samples",
        "2000",
        "--seed",
        "5",
        "--base",
        path,
    ]);
    assert_eq!(code, EXIT_OK);
    let report: CoveringReport = serde_json::from_str(json_part(&output)).unwrap();
    assert!(report.pass);
    assert_eq!(report.samples, 2000);

    let (code, output) = run(&["diamond", "--theta", "0,pi", "--theta-prime", "0,0"]);
    assert_eq!(code, EXIT_OK);
    assert!(output.starts_with("1.41421356\n"), "{output}");
}

#[test]
fn ensemble_summary_and_csv_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path: PathBuf = dir.path().join("trials.csv");
    let json_path: PathBuf = dir.path().join("summary.json");
    let (code, _) = run(&[
        "ensemble",
        "--dim",
        "4",
        "--epsilon",
        "0.3",
        "--trials",
        "8",
        "--seed",
        "9",
        "--trials-csv",
        csv_path.to_str().unwrap(),
        "--output",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);

    let summary: EnsembleSummary =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(summary.trials, 8);

    let csv_text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv_text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("trial,spectrum_seed,dim,epsilon,mean"));
    assert_eq!(lines.count(), 8);

    // Same seed, same bytes.
    let (code, _) = run(&[
        "ensemble",
        "--dim",
        "4",
        "--epsilon",
        "0.3",
        "--trials",
        "8",
        "--seed",
        "9",
        "--trials-csv",
        csv_path.to_str().unwrap(),
        "--output",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), csv_text);
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let state = two_level_file();
    let mut cfg = tempfile::NamedTempFile::with_suffix(".toml").unwrap();
    writeln!(
        cfg,
        "state = \"{}\"\nepsilon = 0.2",
        state.path().to_str().unwrap()
    )
    .unwrap();
    cfg.flush().unwrap();

    let (code, output) = run(&["exit", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let cert: TimingCertificate = serde_json::from_str(json_part(&output)).unwrap();
    assert!((cert.t_exit.unwrap() - 0.2f64.asin()).abs() < 1e-8);

    // Explicit flag wins over the config entry.
    let (code, output) = run(&[
        "exit",
        "--config",
        cfg.path().to_str().unwrap(),
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(code, EXIT_OK);
    let cert: TimingCertificate = serde_json::from_str(json_part(&output)).unwrap();
    assert!((cert.t_exit.unwrap() - 0.1f64.asin()).abs() < 1e-8);
}

#[test]
fn csv_state_files_load() {
    let mut file = tempfile::NamedTempFile::with_suffix(".csv").unwrap();
    writeln!(file, "lambda,re,im").unwrap();
    writeln!(file, "-1.0,0.7071067811865476,0.0").unwrap();
    writeln!(file, "1.0,0.0,0.7071067811865476").unwrap();
    file.flush().unwrap();
    let (code, output) = run(&["moments", "--state", file.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let m: MomentSummary = serde_json::from_str(json_part(&output)).unwrap();
    assert!((m.variance - 1.0).abs() < 1e-12);
}

#[test]
fn error_paths_use_documented_exit_codes() {
    let state = two_level_file();
    let path = state.path().to_str().unwrap();

    let (code, _) = run(&["exit", "--state", "/nonexistent.json", "--epsilon", "0.1"]);
    assert_eq!(code, EXIT_PRECONDITION);

    let (code, _) = run(&["exit", "--state", path]);
    assert_eq!(code, EXIT_PRECONDITION, "missing epsilon");

    let (code, _) = run(&["exit", "--state", path, "--epsilon", "1.5"]);
    assert_eq!(code, EXIT_PRECONDITION, "threshold out of range");

    let (code, _) = run(&["nonsense"]);
    assert_eq!(code, EXIT_PRECONDITION, "unknown subcommand");

    // Horizon too small to reach the crossing.
    let (code, output) = run(&[
        "exit",
        "--state",
        path,
        "--epsilon",
        "0.9",
        "--t-max",
        "0.1",
    ]);
    assert_eq!(code, EXIT_HORIZON, "{output}");
    assert!(output.contains("horizon exhausted"));

    let (code, _) = run(&[
        "scenario",
        "--epsilon",
        "0.1",
        "--ratios",
        "100",
        "--horizon",
        "0.05",
    ]);
    assert_eq!(code, EXIT_HORIZON);

    // A stationary state never exits; that is an answer, not an error.
    let mut eigen = tempfile::NamedTempFile::with_suffix(".json").unwrap();
    write!(
        eigen,
        r#"{{"eigenvalues": [2.0], "amplitudes": [[1.0, 0.0]]}}"#
    )
    .unwrap();
    eigen.flush().unwrap();
    let (code, output) = run(&[
        "exit",
        "--state",
        eigen.path().to_str().unwrap(),
        "--epsilon",
        "0.3",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(output.contains("never exits"), "{output}");
}
