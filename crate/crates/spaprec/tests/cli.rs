use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spaprec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spaprec")).args(args).output().unwrap()
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn help_is_success_and_bad_usage_is_one() {
    assert_eq!(spaprec(&["--help"]).status.code(), Some(0));
    assert_eq!(spaprec(&["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(spaprec(&[]).status.code(), Some(1));
}

#[test]
fn gen_then_unmix_recovers_pure_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"m": 8, "r": 4, "delta_grid": [0]}"#);
    let inst = dir.path().join("inst");
    let out = spaprec(&["gen", "--config", &cfg, "--out", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["W.csv", "H.csv", "N.csv", "X.csv", "meta.json"] {
        assert!(inst.join(f).exists(), "{f}");
    }
    let unmixed = dir.path().join("unmixed");
    let out = spaprec(&[
        "unmix",
        inst.join("X.csv").to_str().unwrap(),
        "-r",
        "4",
        "--algorithm",
        "PW-SPA",
        "--truth",
        inst.join("W.csv").to_str().unwrap(),
        "--out",
        unmixed.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut idx: Vec<usize> =
        fs::read_to_string(unmixed.join("indices.csv")).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    idx.sort();
    assert_eq!(idx, vec![0, 1, 2, 3]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("MRSA"));
    assert_eq!(fs::read_to_string(unmixed.join("mrsa.csv")).unwrap().lines().count(), 5);
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2,3\n4,five,6\n").unwrap();
    let out = spaprec(&["unmix", bad.to_str().unwrap(), "-r", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(":2:2"), "{err}");
}

#[test]
fn missing_config_is_io_error() {
    let out = spaprec(&["sweep", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"trials": 0}"#);
    assert_eq!(spaprec(&["sweep", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn sweep_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"m": 8, "r": 4, "delta_grid": {"start": 0, "stop": 0.1, "step": 0.05}, "trials": 2}"#,
    );
    let out_dir = dir.path().join("out");
    let out = spaprec(&["sweep", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--jobs", "2", "--svg"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 1 + 3 * 2 * 4);
    assert!(out_dir.join("summary.csv").exists());
    assert!(out_dir.join("fraction.svg").exists());
}

#[test]
fn bounds_exit_zero_when_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"m": 5, "r": 3, "delta_grid": [0, 0.001], "trials": 2, "alpha_target": 0.5}"#);
    let out_dir = dir.path().join("b");
    let out = spaprec(&["bounds", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = fs::read_to_string(out_dir.join("bounds.csv")).unwrap();
    assert!(csv.lines().any(|l| l.contains("ellipsoid_kappa_target") && l.contains(",24,")));
}
