use std::path::Path;
use std::process::{Command, Output};

use reflectlab::config::{FileConfig, Overrides, Settings};
use serde_json::Value;

fn reflectlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reflectlab"))
        .args(args)
        .env_remove("REFLECTLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn all_suites_pass_with_defaults() {
    let out = reflectlab(&["check", "--suite", "all", "--n", "2", "--N", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("SUITE ybe: 50/50"), "{text}");
    assert!(!text.contains("negative_control"));
    assert!(text.lines().last().unwrap().starts_with("TOTAL "));
}

#[test]
fn negative_control_fails_by_design() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neg.json");
    let out = reflectlab(&[
        "check",
        "--suite",
        "negative_control",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    let report = read_report(&path);
    let records = report["records"].as_array().unwrap();
    let sensitivity = records
        .iter()
        .find(|r| r["check_id"] == "sensitivity")
        .unwrap();
    assert_eq!(sensitivity["pass"], true);
    assert_eq!(sensitivity["comparison"], "at_least");
    assert!(records.iter().any(|r| r["pass"] == false));
}

#[test]
fn configuration_errors_exit_with_two() {
    let unknown = reflectlab(&["check", "--suite", "nonsense"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("nonsense"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.json");
    std::fs::write(&path, r#"{"n": 2, "N": 2, "z": [[0.9, 0.1], [0.9, 0.1]]}"#).unwrap();
    let dup = reflectlab(&[
        "check",
        "--suite",
        "ybe",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert_eq!(dup.status.code(), Some(2));

    std::fs::write(&path, r#"{"n": 2, "bogus": 1}"#).unwrap();
    let bad = reflectlab(&[
        "check",
        "--suite",
        "ybe",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));

    let threads = Command::new(env!("CARGO_BIN_EXE_reflectlab"))
        .args(["check", "--suite", "ybe"])
        .env("REFLECTLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn default_config_round_trips() {
    let out = reflectlab(&["check", "--print-default-config"]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("default.json");
    std::fs::write(&path, stdout(&out)).unwrap();
    let file = FileConfig::load(&path).unwrap();
    let resolved = Settings::resolve(&file, &Overrides::default()).unwrap();
    let defaults = Settings::defaults(2, 3);
    assert_eq!(resolved.hash(), defaults.hash());

    let run = reflectlab(&[
        "check",
        "--suite",
        "sectors",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", stdout(&run));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 3, "N": 1, "seed": 7}"#).unwrap();
    let report = dir.path().join("r.json");
    let out = reflectlab(&[
        "check",
        "--suite",
        "ybe",
        "--config",
        cfg.to_str().unwrap(),
        "--N",
        "2",
        "--seed",
        "9",
        "--trials",
        "3",
        "--tol",
        "1e-6",
        "--q",
        "1.2,-0.1",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let r = read_report(&report);
    assert_eq!(r["config"]["n"], 3);
    assert_eq!(r["config"]["N"], 2);
    assert_eq!(r["provenance"]["seed"], 9);
    assert_eq!(r["config"]["q"], serde_json::json!([1.2, -0.1]));
    let records = r["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|rec| rec["threshold"] == 1e-6));
    assert_eq!(r["config"]["tolerances"]["negative_control"], 1e-4);
}

#[test]
fn report_schema_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = reflectlab(&[
        "check",
        "--suite",
        "unitarity",
        "--trials",
        "2",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let r = read_report(&path);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["provenance"]["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(r["suites"], serde_json::json!(["unitarity"]));
    for rec in r["records"].as_array().unwrap() {
        for key in [
            "suite",
            "check_id",
            "anchor",
            "params",
            "residual",
            "threshold",
            "pass",
        ] {
            assert!(rec.get(key).is_some(), "missing {key} in {rec}");
        }
    }
}
