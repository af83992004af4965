use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use volex_core::report::Report;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

fn volex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volex")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TORUS: &str = r#"{
    "name": "probe",
    "signature": "riemannian",
    "coordinates": [{ "name": "x", "period": 1.0 }, { "name": "y", "period": 1.0 }],
    "metric": { "diagonal": ["1", "1"] },
    "vector_field": FIELD,
    "grid": 16,
    "analyses": ["green"]
}"#;

fn torus_file(dir: &Path, field: &str) -> PathBuf {
    let path = dir.join("probe.json");
    std::fs::write(&path, TORUS.replace("FIELD", field)).unwrap();
    path
}

#[test]
fn validate_accepts_fixtures() {
    let out = volex(&["validate", path_str(&fixture("flrw_matter"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn passing_run_exits_zero_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("s.csv");
    let out = volex(&[
        "run",
        path_str(&fixture("gaussian_soliton")),
        "--analysis",
        "soliton",
        "--out",
        path_str(&json),
        "--csv",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(report.passed);
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert_eq!(rows, report.sample_count() + 1);
}

#[test]
fn failed_check_exits_one() {
    let out = volex(&["run", path_str(&fixture("gaussian_soliton")), "--analysis", "flow", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL flow"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(volex(&["validate", path_str(&missing)]).status.code(), Some(2));
    let bad = torus_file(dir.path(), r#"["sin(x", "0"]"#);
    let out = volex(&["validate", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vector_field[0]"));
    // a soliton check on a scenario without a soliton block
    let ok = torus_file(dir.path(), r#"["sin(y)", "0"]"#);
    assert_eq!(volex(&["run", path_str(&ok), "--analysis", "soliton"]).status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = torus_file(dir.path(), r#"["log(x)", "0"]"#);
    let out = volex(&["run", path_str(&path), "--analysis", "green"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let status = volex(&["run", path_str(&fixture("torus_shear")), "--threads", threads, "--out", path_str(out)]);
        assert_eq!(status.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
