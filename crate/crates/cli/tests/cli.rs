//! End-to-end tests of the `microcosm` binary: command semantics, exit codes,
//! file formats, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_microcosm"))
}

fn write_spec(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn conjugate_flat_spec_is_empty_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "flat.json",
        r#"{"n": 2, "form": "alekseevsky", "omega": [[0,0],[0,0]], "p": [[0,0],[0,0]]}"#,
    );
    let out = run(&["conjugate", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["conjugate_points"].as_array().unwrap().len(), 0);
}

#[test]
fn conjugate_unit_energy_gives_pi_multiples() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "a1.json", r#"{"A": 1, "B": 0, "C": 0, "w": 0}"#);
    let out = run(&[
        "conjugate",
        "--spec",
        spec.to_str().unwrap(),
        "--u-max",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let pts: Vec<f64> = v["conjugate_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(pts.len(), 3);
    for (k, p) in pts.iter().enumerate() {
        assert!((p - std::f64::consts::PI * (k + 1) as f64).abs() < 1.0e-6);
    }
}

#[test]
fn non_skew_omega_exits_2_naming_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "bad.json",
        r#"{"n": 2, "form": "alekseevsky", "omega": [[0,1],[1,0]], "p": [[1,0],[0,1]]}"#,
    );
    let out = run(&["conjugate", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("skew"), "stderr: {err}");
}

#[test]
fn malformed_json_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "broken.json", "{\n  \"A\": 1,\n  oops\n}");
    let out = run(&["riccati", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn validation_of_range_flags() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "a1.json", r#"{"A": 1, "B": 0, "C": 0, "w": 0}"#);
    let out = run(&[
        "sachs",
        "--spec",
        spec.to_str().unwrap(),
        "--u-min",
        "2",
        "--u-max",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lo < hi"));
}

#[test]
fn deterministic_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "rot.json", r#"{"A": 0.8, "B": 0.4, "C": 0.1, "w": 0.6}"#);
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    for (cmd, path) in [("orbit", &out1), ("orbit", &out2)] {
        let st = run(&[
            cmd,
            "--spec",
            spec.to_str().unwrap(),
            "--u-max",
            "1",
            "--samples",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(st.status.code(), Some(0));
    }
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "identical JobSpec must give byte-identical output");
}

#[test]
fn sachs_csv_has_header_and_residual_column() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "a1.json", r#"{"A": 1, "B": 0, "C": 0, "w": 0}"#);
    let out = run(&[
        "sachs",
        "--spec",
        spec.to_str().unwrap(),
        "--u-max",
        "1",
        "--samples",
        "5",
        "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("u,"));
    assert!(header.ends_with(",residual"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn riccati_dim2_reports_all_solutions() {
    let dir = tempfile::tempdir().unwrap();
    // |p| < 0 case: four complex solutions
    let spec = write_spec(&dir, "q.json", r#"{"A": 0, "B": 1, "C": 0, "w": 0}"#);
    let out = run(&["riccati", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 4);
    for s in v["solutions"].as_array().unwrap() {
        assert!(s["residual"].as_f64().unwrap() < 1.0e-10);
        assert_eq!(s["real"], false);
    }
}

#[test]
fn riccati_n3_single_solution() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "n3.json",
        r#"{"n": 3, "form": "brinkmann",
            "omega": [[0,0.3,0],[-0.3,0,0.1],[0,-0.1,0]],
            "p": [[1,0.2,0],[0.2,0.5,0],[0,0,-0.4]]}"#,
    );
    let out = run(&["riccati", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 1);
    assert!(v["solutions"][0]["residual"].as_f64().unwrap() < 1.0e-8);
}

#[test]
fn verify_passes_on_generic_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "rot.json", r#"{"A": 0.8, "B": 0.4, "C": 0.1, "w": 0.6}"#);
    let report = dir.path().join("verify.json");
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 7);
    assert!(!stdout.contains("FAIL"));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn series_emits_low_order_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    // Brinkmann p = I (shorthand is Alekseevsky: p_B = p_A − ω² = p_A here)
    let spec = write_spec(&dir, "a1.json", r#"{"A": 1, "B": 0, "C": 0, "w": 0}"#);
    let out = run(&["series", "--spec", spec.to_str().unwrap(), "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let coeffs = v["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 5);
    // S₁ = p/3 = diag(1/3, 1/3)
    assert!((coeffs[1][0][0][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1.0e-14);
    assert!(coeffs[1][0][1][0].as_f64().unwrap().abs() < 1.0e-14);
}
