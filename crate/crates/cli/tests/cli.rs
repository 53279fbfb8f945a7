use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dataset() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/chronic_kidney_disease_full.arff")
}

fn leakless(args: &[&str], dataset: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leakless"))
        .args(args)
        .env("LEAKLESS_DATASET", dataset)
        .output()
        .unwrap()
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str::<Value>(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))["error"].clone()
}

#[test]
fn invalid_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"split_ratio": 0}"#).unwrap();
    let out = leakless(&["prepare", "--config", path.to_str().unwrap()], &dataset());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_error(&out);
    assert_eq!(err["exit_code"], 2);
    assert!(err["message"].as_str().unwrap().contains("split_ratio"));
    assert!(err["kind"].is_string());
}

#[test]
fn unknown_flag_exits_with_2() {
    let out = leakless(&["run", "--no-such-flag"], &dataset());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "usage");
}

#[test]
fn missing_dataset_exits_with_3_and_explains_retrieval() {
    let dir = tempfile::tempdir().unwrap();
    let out = leakless(&["prepare"], &dir.path().join("absent.arff"));
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_error(&out);
    assert_eq!(err["exit_code"], 3);
    assert!(err["hint"].as_str().unwrap().contains("archive.ics.uci.edu"));
}

#[test]
fn run_report_matches_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"cv": {"repeats": 1}, "feature_sets": "f3"}"#).unwrap();
    let out = leakless(
        &["run", "--ci", "--format", "both", "--seed", "7", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
        &dataset(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let schema_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas/run_report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    assert_eq!(report["cells"].as_array().unwrap().len(), 9);
    assert!(dir.path().join("report.md").exists());
}

#[test]
fn prepare_prints_json_to_stdout() {
    let out = leakless(&["prepare", "--ci", "--seed", "3"], &dataset());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object());
}
