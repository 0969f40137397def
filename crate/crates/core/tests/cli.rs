use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rainbow-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("RAINBOW_LAB_THREADS")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// The last JSON document on stdout; a replay prints the rerun's summary first.
fn stdout_json(out: &Output) -> Value {
    serde_json::Deserializer::from_slice(&out.stdout).into_iter::<Value>().last().unwrap().unwrap()
}

#[test]
fn decide_k3_on_itself_arrows() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(dir.path(), &["construct", "--graph", "K3", "--emit", "k3.json"])), 0);
    assert!(dir.path().join("k3.json.manifest.json").is_file());
    let out = lab(dir.path(), &["decide", "--graph", "k3.json", "--target", "K3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["outcome"], "arrows");
}

#[test]
fn decide_reports_an_avoiding_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["decide", "--graph", "K4", "--target", "K4"]);
    assert_eq!(code(&out), 0);
    assert_ne!(stdout_json(&out)["outcome"], "arrows");
    assert!(stdout_json(&out)["witness"].is_object() || stdout_json(&out)["witness"].is_array());
}

#[test]
fn density_of_hat_k34() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["density", "--graph", "hatk34", "--exponent", "7/15"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(dir.path(), &["no-such-command"])), 3);
    assert_eq!(code(&lab(dir.path(), &["decide", "--graph", "missing.json", "--target", "K3"])), 3);
    assert_eq!(code(&lab(dir.path(), &["density", "--graph", "K3", "--exponent", "1/0"])), 3);
    assert_eq!(code(&lab(dir.path(), &["construct", "--graph", "K3", "--format", "dot"])), 3);
    assert_eq!(code(&lab(dir.path(), &["--help"])), 0);
}

#[test]
fn exhausted_search_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["decide", "--graph", "K6", "--target", "K4", "--nodes", "3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn avoiders_emit_validated_colourings() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, p) in [("avoid-k4", "0.5n^-1.25"), ("avoid-k6", "n^-0.7")] {
        let file = format!("{cmd}.json");
        let out = lab(dir.path(), &[cmd, "--n", "60", "--p", p, "--seed", "3", "--emit", &file]);
        assert_eq!(code(&out), 0, "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.path().join(&file).is_file());
        assert!(dir.path().join(format!("{file}.manifest.json")).is_file());
    }
}

#[test]
fn scan_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "scan",
        "--ell",
        "4",
        "--n",
        "20,40",
        "--p",
        "n^-1.25,n^-1",
        "--trials",
        "20",
        "--seed",
        "9",
        "--no-timing",
        "--emit",
        "scan.csv",
    ];
    assert_eq!(code(&lab(dir.path(), &args)), 0);
    let first = std::fs::read(dir.path().join("scan.csv")).unwrap();
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("scan.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "scan");
    assert_eq!(manifest["seed"], 9);

    let out = lab(dir.path(), &["replay", "scan.csv.manifest.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["identical"], true);
    assert_eq!(std::fs::read(dir.path().join("scan.csv")).unwrap(), first);
}

#[test]
fn replay_flags_changed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(dir.path(), &["construct", "--graph", "t10", "--format", "edges", "--emit", "t10.txt"])), 0);
    std::fs::write(dir.path().join("t10.txt"), "tampered\n").unwrap();
    let out = lab(dir.path(), &["replay", "t10.txt.manifest.json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["identical"], false);
}

#[test]
fn certify_writes_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["certify", "rainbow-k5", "--trials", "50", "--out", "cx"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("cx/rainbow-k5-report.json").is_file());
}
