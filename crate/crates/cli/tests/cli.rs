//! CLI behavior: exit codes, deterministic datagen, and run artifacts.

use std::path::Path;
use std::process::Command;

fn agora() -> Command {
    Command::new(env!("CARGO_BIN_EXE_agora"))
}

fn file_bytes(dir: &Path) -> Vec<u8> {
    let mut all = Vec::new();
    for file in [
        "universe.json",
        "customers.json",
        "businesses.json",
        "ground_truth.json",
    ] {
        all.extend(std::fs::read(dir.join(file)).unwrap());
    }
    all
}

#[test]
fn datagen_is_deterministic_and_scales_correctly() {
    let root = tempfile::tempdir().unwrap();
    let dir_a = root.path().join("a");
    let dir_b = root.path().join("b");

    for dir in [&dir_a, &dir_b] {
        let output = agora()
            .args(["datagen", "--domain", "restaurants", "--scale", "small", "--seed", "7"])
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert!(stdout.contains("33 customers, 99 businesses"), "{stdout}");
        assert!(stdout.contains("lint: clean"));
    }
    assert_eq!(file_bytes(&dir_a), file_bytes(&dir_b), "same flags, same bytes");

    let medium = root.path().join("m");
    let output = agora()
        .args(["datagen", "--domain", "contractors", "--scale", "medium", "--seed", "3"])
        .arg("--out")
        .arg(&medium)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("100 customers, 300 businesses"));
}

#[test]
fn exit_codes_follow_the_contract() {
    // 1: usage error.
    let output = agora().args(["datagen", "--scale", "galactic", "--out", "/tmp/x"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    let output = agora().args(["frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    // 2: validation error (impossible generation config).
    let root = tempfile::tempdir().unwrap();
    let output = agora()
        .args(["datagen", "--seed", "7", "--full-fit", "9"])
        .arg("--out")
        .arg(root.path().join("bad"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{}", String::from_utf8_lossy(&output.stderr));

    // 2: missing dataset for run.
    let output = agora()
        .args(["run", "--study", "welfare", "--dataset", "/nonexistent/dataset"])
        .arg("--out")
        .arg(root.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    // 0: help.
    let output = agora().args(["--help"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn run_bias_study_writes_report_csv_and_manifest() {
    let root = tempfile::tempdir().unwrap();
    let dataset_dir = root.path().join("dataset");
    let output = agora()
        .args(["datagen", "--domain", "restaurants", "--scale", "small", "--seed", "7"])
        .arg("--out")
        .arg(&dataset_dir)
        .output()
        .unwrap();
    assert!(output.status.success());

    let out_dir = root.path().join("bias-out");
    let output = agora()
        .args([
            "run",
            "--study",
            "bias",
            "--kind",
            "proposal",
            "--policy",
            "first-accepter",
            "--trials",
            "6",
            "--seed",
            "5",
        ])
        .arg("--dataset")
        .arg(&dataset_dir)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["study"], "bias_proposal");

    // First-accepter takes rank 1 in every trial.
    let rank1 = report["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["condition"] == "rank_1")
        .unwrap();
    assert_eq!(rank1["metrics"]["selection_rate"]["mean"], 1.0);

    let csv = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(csv.contains("rank_1"));

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["dataset_sha256"].as_str().unwrap().len() == 64);
    assert_eq!(manifest["study"], "bias_proposal");
}
