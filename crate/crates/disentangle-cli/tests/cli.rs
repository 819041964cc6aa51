//! Behavioral tests for the `disentangle` binary: argument handling, exit
//! codes, and report structure.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disentangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("report exists");
    serde_json::from_str(&text).expect("report is valid JSON")
}

#[test]
fn period_report_has_the_documented_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&[
        "period", "--N", "15", "--b", "7", "--samples", "8", "--seed", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let report = read_json(&out);
    for key in ["config", "seed", "version", "results", "checks"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["config"]["command"], "period");
    assert_eq!(report["seed"], 1);
    assert_eq!(report["results"]["true_period"], 4);
    assert_eq!(report["results"]["inferred_period"], 4);
    assert_eq!(report["results"]["domain_size"], 512);
    assert_eq!(report["results"]["measured_mixture"].as_array().unwrap().len(), 512);
    assert_eq!(report["results"]["samples"].as_array().unwrap().len(), 8);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn period_csv_dumps_one_row_per_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dist.csv");
    let output = run(&[
        "period", "--N", "15", "--b", "7", "--samples", "4", "--seed", "1", "--out",
        out.to_str().unwrap(), "--format", "csv",
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 513);
    assert_eq!(lines[0], "r,measured_mixture,reduced_density,full_state");
}

#[test]
fn period_with_custom_register_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&[
        "period", "--N", "15", "--b", "7", "--k", "10", "--samples", "8", "--seed", "3",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let report = read_json(&out);
    assert_eq!(report["results"]["domain_size"], 1024);
    assert_eq!(report["results"]["inferred_period"], 4);
}

#[test]
fn constant_function_confirms_period_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    // Every sample is r = 0, but the spot check f(x) = f(x + 1) settles the
    // period directly.
    let output = run(&[
        "period", "--N", "2", "--b", "1", "--samples", "8", "--seed", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let report = read_json(&out);
    assert_eq!(report["results"]["true_period"], 1);
    assert_eq!(report["results"]["inferred_period"], 1);
}

#[test]
fn zero_information_samples_are_inconclusive_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    // Seed 3 draws the single sample r = 0, which pins down nothing for a
    // non-constant function.
    let output = run(&[
        "period", "--N", "15", "--b", "7", "--samples", "1", "--seed", "3", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let report = read_json(&out);
    assert_eq!(report["results"]["samples"], serde_json::json!([0]));
    assert_eq!(report["results"]["inferred_period"], serde_json::Value::Null);
}

#[test]
fn invalid_configs_exit_two_with_diagnostics() {
    let cases: &[&[&str]] = &[
        &["period", "--N", "15", "--b", "6", "--samples", "4", "--seed", "1", "--out", "/tmp/x"],
        &["period", "--N", "1", "--b", "1", "--samples", "4", "--seed", "1", "--out", "/tmp/x"],
        &["period", "--N", "15", "--b", "7", "--k", "4", "--samples", "4", "--seed", "1", "--out", "/tmp/x"],
        &["qec", "--code", "steane", "--channel", "mixed", "--trials", "1", "--seed", "1", "--out", "/tmp/x"],
        &["qec", "--code", "five-qubit", "--channel", "depolarize", "--trials", "1", "--seed", "1", "--out", "/tmp/x"],
        &["qec", "--code", "bit-flip", "--channel", "pauli:x4", "--trials", "1", "--seed", "1", "--out", "/tmp/x"],
        &["qec", "--code", "five-qubit", "--channel", "pauli:x0", "--trials", "1", "--seed", "1", "--out", "/tmp/x"],
        &["verify", "--code", "repetition"],
    ];
    for args in cases {
        let output = run(args);
        assert_eq!(output.status.code(), Some(2), "args {args:?}: {output:?}");
        assert!(!output.stderr.is_empty(), "args {args:?} gave no diagnostic");
    }
}

#[test]
fn qec_all_paulis_runs_one_trial_per_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&[
        "qec", "--code", "five-qubit", "--channel", "all-paulis", "--trials", "1", "--seed",
        "7", "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let report = read_json(&out);
    assert_eq!(report["results"]["total_trials"], 15);
    assert_eq!(report["results"]["passed_trials"], 15);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "syndrome-point-mass" && c["pass"] == true));
}

#[test]
fn qec_pauli_channel_reports_a_point_mass_syndrome() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&[
        "qec", "--code", "five-qubit", "--channel", "pauli:zx3", "--trials", "2", "--seed",
        "5", "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let report = read_json(&out);
    // zx on qubit 3 (1-based) is syndrome 13: identity + 5 x + 5 z + offset 3.
    let trial = &report["results"]["trials"][0];
    let syndrome = trial["syndrome_distribution"].as_array().unwrap();
    assert!(syndrome[13].as_f64().unwrap() > 1.0 - 1e-10);
    assert_eq!(trial["description"], "pauli zx3");
}

#[test]
fn bit_flip_phase_error_fails_fidelity_but_stays_product() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&[
        "qec", "--code", "bit-flip", "--channel", "phase-error", "--trials", "3", "--seed",
        "4", "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "expected-failure demos still exit 0");
    let report = read_json(&out);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "all-trials-product" && c["pass"] == true));
    assert!(checks.iter().any(|c| c["name"] == "all-trials-fidelity" && c["pass"] == false));
    for trial in report["results"]["trials"].as_array().unwrap() {
        assert!(trial["logical_fidelity"].as_f64().unwrap() < 1.0 - 1e-10);
    }
}

#[test]
fn verify_reports_compliance_per_qubit() {
    let five = run(&["verify", "--code", "five-qubit"]);
    assert!(five.status.success());
    let report: serde_json::Value =
        serde_json::from_slice(&five.stdout).expect("stdout is a JSON report");
    assert_eq!(report["results"]["compliant"], true);
    let qubits = report["results"]["orthogonality"].as_array().unwrap();
    assert_eq!(qubits.len(), 5);
    for q in qubits {
        assert_eq!(q["scalar_products"].as_array().unwrap().len(), 10);
        assert_eq!(q["satisfied"], true);
    }

    let flip = run(&["verify", "--code", "bit-flip"]);
    assert!(flip.status.success());
    let report: serde_json::Value = serde_json::from_slice(&flip.stdout).unwrap();
    assert_eq!(report["results"]["compliant"], false);
    assert_eq!(report["results"]["description"]["complete"], false);
}

#[test]
fn reports_embed_config_seed_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    run(&[
        "qec", "--code", "bit-flip", "--channel", "superposed", "--trials", "2", "--seed",
        "42", "--out", out.to_str().unwrap(),
    ]);
    let report = read_json(&out);
    assert_eq!(report["config"]["seed"], 42);
    assert_eq!(report["seed"], 42);
    assert_eq!(report["config"]["env_dim"], 4);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
}
