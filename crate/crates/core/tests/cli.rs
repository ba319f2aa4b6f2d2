//! End-to-end runs of the `projent` binary.

use std::process::{Command, Output};

fn projent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projent")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn bits(v: &serde_json::Value) -> f64 {
    v["bits"].as_f64().unwrap()
}

#[test]
fn measure_examples() {
    let out = projent(&["measure", "--quantity", "dproj", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.75"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((bits(&json(&out)["value"]) - 1.584963).abs() < 1e-6);

    let out = projent(&["measure", "--quantity", "dproj", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.3"]);
    assert!(bits(&json(&out)["value"]).abs() < 1e-6);

    let out = projent(&["measure", "--quantity", "rs", "--cone", "ppt:2,2", "--state", "maxent:d=2"]);
    assert!((bits(&json(&out)["value"]) - 1.0).abs() < 1e-6);
}

#[test]
fn infinite_values_serialize_as_plus_inf() {
    let out = projent(&["measure", "--quantity", "dproj", "--cone", "ppt:2,2", "--state", "maxent:d=2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"]["bits"], "+inf");
    assert!(v["value"]["reason"].is_string());
}

#[test]
fn pairwise_measure() {
    let out = projent(&["measure", "--quantity", "dproj", "--state", "diag:0.9,0.1", "--sigma", "mixed:d=2"]);
    assert!((bits(&json(&out)["value"]) - 9f64.log2()).abs() < 1e-9);
}

#[test]
fn fig2_rows_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig2.csv");
    let svg = dir.path().join("fig2.svg");
    let out = projent(&[
        "fig2",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("\n0.5,0.000000000,0.000000000\n"));
    assert!(text.contains("\n0.75,1.584962501,0.188721876\n"));
    assert!(text.contains("\n0.9,3.169925001,0.531004406\n"));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 2);
}

#[test]
fn fig2_self_check_failure_exits_three() {
    let out = projent(&["fig2", "--p-grid", "0.6:0.9:0.1", "--check-tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn outputs_are_byte_stable() {
    let args = ["regularize", "--quantity", "dproj", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.75", "--nmax", "2"];
    let a = projent(&args);
    let b = projent(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("measure,n,eps,per_copy_bits,provenance\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn rate_tradeoff_and_presets() {
    let out = projent(&[
        "rate", "--kind", "tradeoff", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.75", "--target", "maxent:d=2",
        "--errors", "constant:0.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((bits(&v["value"]) - 1.584963).abs() < 1e-6);
    assert_eq!(v["kind"], "strong_converse");

    let out = projent(&[
        "rate", "--kind", "tradeoff", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.75", "--target", "maxent:d=2",
        "--errors", "superexponential",
    ]);
    let v = json(&out);
    assert_eq!(bits(&v["value"]), 0.0);
    assert!(!v["caveats"].as_array().unwrap().is_empty());

    let out = projent(&["rate", "--kind", "dichotomy", "--preset", "commuting-qubits"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "exact");
    let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
    let expected = (1.8f64.log2() + 5f64.log2()) / (1.0 - h(0.8));
    assert!((bits(&v["value"]) - expected).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(projent(&["measure", "--quantity", "dproj"]).status.code(), Some(1));
    assert_eq!(projent(&["bogus"]).status.code(), Some(1));
    assert_eq!(projent(&["--version"]).status.code(), Some(0));
    let wrong = projent(&[
        "rate", "--kind", "exact-affine", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.75", "--target", "maxent:d=2",
    ]);
    assert_eq!(wrong.status.code(), Some(4));
    assert!(!wrong.stderr.is_empty());
}

#[test]
fn dimension_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_projent"))
        .args(["regularize", "--quantity", "dmax", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.75", "--nmax", "2"])
        .env("PROJENT_DIM_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn state_and_cone_files() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("rho.json");
    std::fs::write(&state, r#"{"matrix": [[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]}"#).unwrap();
    let cone = dir.path().join("cone.json");
    std::fs::write(&cone, r#"{"kind": "diagonal", "dim": 2}"#).unwrap();
    let out = projent(&[
        "measure", "--quantity", "d", "--cone", cone.to_str().unwrap(), "--state", state.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((bits(&json(&out)["value"]) - 1.0).abs() < 1e-9);
}
