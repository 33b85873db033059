//! End-to-end checks of the command-line surface: every subcommand runs,
//! writes the promised files, and reproduces deterministically.

use std::path::Path;

use clap::Parser;
use privgp_cli::{error_json, execute, Cli};
use privgp_core::gp::Dataset;
use privgp_core::Error;

fn run(args: &[&str]) -> privgp_core::Result<()> {
    let cli = Cli::try_parse_from(args).expect("argument parsing");
    execute(&cli)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"))
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&read(path)).unwrap()
}

fn write_nine_point_dataset(path: &Path) {
    let points: Vec<Vec<f64>> = (1..=9).map(|i| vec![i as f64 / 10.0]).collect();
    let values: Vec<f64> = points.iter().map(|p| (2.0 * p[0]).cos()).collect();
    Dataset::new(points, values)
        .unwrap()
        .write_csv(path)
        .unwrap();
}

#[test]
fn example1_outputs_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run1");
    run(&["privgp", "example1", "--out", out.to_str().unwrap()]).unwrap();
    for file in [
        "sigma_opt.csv",
        "noise_variances.csv",
        "predictive_variance.csv",
        "summary.json",
    ] {
        assert!(out.join(file).exists(), "missing {file}");
    }
    let summary = json(&out.join("summary.json"));
    let var_at_s = summary["var_at_s"].as_f64().unwrap();
    let unsecured = summary["unsecured_var_at_s"].as_f64().unwrap();
    assert!(var_at_s >= 0.5 - 1e-6);
    assert!(unsecured < 0.5);
    assert!(summary["trace_diag"].as_f64().unwrap() >= summary["trace_opt"].as_f64().unwrap());

    // deterministic: a second run produces byte-identical files
    let out2 = dir.path().join("run2");
    run(&["privgp", "example1", "--out", out2.to_str().unwrap()]).unwrap();
    for file in ["sigma_opt.csv", "predictive_variance.csv", "summary.json"] {
        assert_eq!(
            read(&out.join(file)),
            read(&out2.join(file)),
            "{file} differs"
        );
    }
}

#[test]
fn example2_trace_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run(&["privgp", "example2", "--out", out.to_str().unwrap()]).unwrap();
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["boundary_c_0_5_accepted"], serde_json::json!(true));
    assert_eq!(summary["c_0_17_rejected"], serde_json::json!(true));
    assert!(
        summary["min_eigenvalue_strong_minus_weak"]
            .as_f64()
            .unwrap()
            < 0.0
    );
    for v in summary["weak_variances_at_s"].as_array().unwrap() {
        assert!((v.as_f64().unwrap() - 0.5).abs() <= 1e-3);
    }
    // every strong trace dominates the weak trace
    let traces = read(&out.join("traces.csv"));
    for line in traces.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[1] >= cells[2] - 1e-6, "row {line}");
    }
}

#[test]
fn example3_probe_table_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run(&["privgp", "example3", "--out", out.to_str().unwrap()]).unwrap();
    let summary = json(&out.join("summary.json"));
    assert_eq!(
        summary["region_vs_validate_pair_disagreements"],
        serde_json::json!(0)
    );
    assert_eq!(summary["c_equal_one_rejected"], serde_json::json!(true));
    assert!(out.join("validity_boundary.csv").exists());
    assert!(out.join("validity_probes.csv").exists());
}

#[test]
fn fit_solve_obfuscate_predict_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let data_path = out.join("data.csv");
    write_nine_point_dataset(&data_path);

    // fit with a fixed correlation
    std::fs::write(
        out.join("correlation.json"),
        r#"{"family":"sqexp","c":1.0,"theta":10.0,"d":1}"#,
    )
    .unwrap();
    run(&[
        "privgp",
        "fit",
        "--data",
        data_path.to_str().unwrap(),
        "--correlation",
        out.join("correlation.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let fit_summary = json(&out.join("fit_summary.json"));
    assert!(fit_summary["variance"].as_f64().unwrap() > 0.0);
    assert_eq!(fit_summary["degenerate"], serde_json::json!(false));

    // solve for the noise covariance under a weak spec
    std::fs::write(
        out.join("privacy.json"),
        r#"{"variant":"weak","S":[[0.4],[0.6]],"xi":[0.05,0.05]}"#,
    )
    .unwrap();
    run(&[
        "privgp",
        "solve-noise",
        "--model",
        out.join("model.json").to_str().unwrap(),
        "--data",
        data_path.to_str().unwrap(),
        "--privacy",
        out.join("privacy.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    assert!(out.join("sigma.json").exists());
    assert!(out.join("sigma.csv").exists());

    // obfuscate with a fixed seed: reproducible W
    run(&[
        "privgp",
        "obfuscate",
        "--data",
        data_path.to_str().unwrap(),
        "--sigma",
        out.join("sigma.json").to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let obfuscated = read(&out.join("obfuscated.csv"));
    run(&[
        "privgp",
        "obfuscate",
        "--data",
        data_path.to_str().unwrap(),
        "--sigma",
        out.join("sigma.json").to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    assert_eq!(obfuscated, read(&out.join("obfuscated.csv")));

    // full pipeline from a config, then predict from the released artifact
    let config = serde_json::json!({
        "dataset": data_path,
        "model": {"fit": {"correlation": {"family":"sqexp","c":1.0,"theta":10.0,"d":1}}},
        "privacy": {"variant":"weak","S":[[0.4],[0.6]],"xi":[0.05,0.05]},
        "seed": 7,
    });
    std::fs::write(out.join("config.json"), config.to_string()).unwrap();
    run(&[
        "privgp",
        "pipeline",
        "--config",
        out.join("config.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    assert!(out.join("released.json").exists());
    assert!(out.join("verification_report.json").exists());

    run(&[
        "privgp",
        "predict",
        "--released",
        out.join("released.json").to_str().unwrap(),
        "--points",
        data_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let predictions = read(&out.join("predictions.csv"));
    assert!(predictions.lines().count() == 10); // header + 9 points
    assert!(predictions.starts_with("x_1,mean,variance,stddev"));
}

#[test]
fn satellite_report_shows_localized_obfuscation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run(&[
        "privgp",
        "satellite",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "11",
    ])
    .unwrap();
    for file in [
        "dataset.csv",
        "segments.json",
        "fit_summary.json",
        "report.json",
        "released_alpha0.1.json",
        "released_alpha0.5.json",
        "band_alpha0.1.csv",
        "band_alpha0.5.csv",
        "obfuscated_alpha0.1.csv",
        "obfuscated_alpha0.5.csv",
    ] {
        assert!(out.join(file).exists(), "missing {file}");
    }
    let report = json(&out.join("report.json"));
    for entry in report["per_alpha"].as_array().unwrap() {
        let inside = entry["mean_band_width_inside"].as_f64().unwrap();
        let outside = entry["mean_band_width_outside"].as_f64().unwrap();
        assert!(
            inside > 2.0 * outside,
            "band inside ({inside}) should dwarf outside ({outside})"
        );
        assert!(entry["worst_floor_margin"].as_f64().unwrap() >= -1e-6);
        let sd_change = entry["max_outside_sd_change"].as_f64().unwrap();
        let prior_sd = entry["prior_sd"].as_f64().unwrap();
        assert!(sd_change < 0.05 * prior_sd);
    }
}

#[test]
fn binary_exit_codes_and_stderr_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    // success path
    let ok = std::process::Command::new(env!("CARGO_BIN_EXE_privgp"))
        .args(["example3", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        ok.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&ok.stderr)
    );
    // failure path: missing input file, JSON document on stderr
    let bad = std::process::Command::new(env!("CARGO_BIN_EXE_privgp"))
        .args([
            "predict",
            "--released",
            out.join("nope.json").to_str().unwrap(),
            "--points",
            out.join("nope.csv").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&bad.stderr);
    let doc: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert!(doc["error"].is_string());
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let err = run(&[
        "privgp",
        "predict",
        "--released",
        out.join("missing.json").to_str().unwrap(),
        "--points",
        out.join("missing.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap_err();
    let doc: serde_json::Value = serde_json::from_str(&error_json(&err)).unwrap();
    assert!(doc["error"].is_string());
    assert!(doc["kind"].is_string());

    // invalid tolerance surfaces with its kind
    let data_path = out.join("data.csv");
    write_nine_point_dataset(&data_path);
    std::fs::write(
        out.join("model.json"),
        r#"{"mean":0.0,"kernel":{"family":"sqexp","c":1.0,"theta":10.0,"d":1},"intrinsic_noise":{"scalar":0.0}}"#,
    )
    .unwrap();
    std::fs::write(
        out.join("privacy.json"),
        r#"{"variant":"single","s":[0.5],"xi":2.0}"#,
    )
    .unwrap();
    let err = run(&[
        "privgp",
        "solve-noise",
        "--model",
        out.join("model.json").to_str().unwrap(),
        "--data",
        data_path.to_str().unwrap(),
        "--privacy",
        out.join("privacy.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap_err();
    assert!(matches!(err, Error::InvalidTolerance(_)));
    let doc: serde_json::Value = serde_json::from_str(&error_json(&err)).unwrap();
    assert_eq!(doc["kind"], serde_json::json!("invalid_tolerance"));
}
