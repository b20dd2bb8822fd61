use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run_job(dir: &Path, job: &str) -> Output {
    let config = dir.join("job.json");
    std::fs::write(&config, job).unwrap();
    Command::new(env!("CARGO_BIN_EXE_zerosphere"))
        .arg("--config")
        .arg(&config)
        .arg("--quiet")
        .env("ZEROSPHERE_THREADS", "2")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap()).unwrap()
}

#[test]
fn verify_sphere_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_job(tmp.path(), r#"{"command": "verify-sphere", "shape": {"type": "sphere", "a": 1.0}}"#);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(tmp.path());
    assert_eq!(r["verdict"], "consistent");
    assert!(out.stdout.is_empty());
}

#[test]
fn scan_writes_curve_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let job = r#"{
        "command": "scan",
        "shape": {"type": "ellipsoid", "axes": [1.0, 1.0, 1.2]},
        "k": {"min": 2.0, "max": 4.0, "steps": 41}
    }"#;
    let out = run_job(tmp.path(), job);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("out/curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,residual_max,residual_l2"));
    assert_eq!(lines.count(), 41);
    let json = std::fs::read(tmp.path().join("out/report.json")).unwrap();

    let again = run_job(tmp.path(), job);
    assert_eq!(code(&again), 0);
    assert_eq!(std::fs::read_to_string(tmp.path().join("out/curve.csv")).unwrap(), csv);
    assert_eq!(std::fs::read(tmp.path().join("out/report.json")).unwrap(), json);
}

#[test]
fn out_flag_overrides_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("job.json");
    std::fs::write(
        &config,
        r#"{"command": "farfield", "shape": {"type": "sphere", "a": 1.0}, "k": {"value": 1.0}, "output": {"formats": ["json"]}}"#,
    )
    .unwrap();
    let target = tmp.path().join("elsewhere");
    let out = Command::new(env!("CARGO_BIN_EXE_zerosphere"))
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(target.join("report.json").exists());
    assert!(!target.join("curve.csv").exists());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1);
}

#[test]
fn nonpositive_k_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_job(
        tmp.path(),
        r#"{"command": "scan", "shape": {"type": "sphere", "a": 1.0}, "k": {"min": 0.0, "max": 4.0, "steps": 10}}"#,
    );
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error:"));
}

#[test]
fn unknown_field_and_missing_mesh_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_job(tmp.path(), r#"{"command": "scan", "shape": {"type": "sphere", "a": 1.0}, "bogus": 1}"#);
    assert_eq!(code(&out), 1);
    let out = run_job(
        tmp.path(),
        r#"{"command": "mesh-scan", "shape": {"type": "mesh", "path": "absent.off"}, "k": {"min": 1.0, "max": 2.0, "steps": 3}}"#,
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.off"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("job.json");
    std::fs::write(&config, r#"{"command": "verify-sphere", "shape": {"type": "sphere", "a": 1.0}}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_zerosphere"))
        .arg("--config")
        .arg(&config)
        .env("ZEROSPHERE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn mesh_scan_reads_off_relative_to_config() {
    let tmp = tempfile::tempdir().unwrap();
    // octahedron
    std::fs::write(
        tmp.path().join("octa.off"),
        "OFF\n6 8 0\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n\
         3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n",
    )
    .unwrap();
    let out = run_job(
        tmp.path(),
        r#"{"command": "mesh-scan", "shape": {"type": "mesh", "path": "octa.off", "refinement": 3},
            "k": {"min": 1.0, "max": 5.0, "steps": 9}, "output": {"formats": ["csv"]}}"#,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("out/curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn violated_tolerance_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_job(
        tmp.path(),
        r#"{"command": "jump", "shape": {"type": "sphere", "a": 1.0}, "k": {"value": 1.0},
            "tolerances": {"jump": 1e-14}}"#,
    );
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(report(tmp.path())["max_jump_error"].as_f64().unwrap() > 1e-13);
}
