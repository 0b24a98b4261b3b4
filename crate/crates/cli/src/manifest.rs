//! Run manifests: enough hashes and settings to re-execute a scripted run
//! bit-identically.

use agora_experiments::{ExperimentReport, StudyFile};
use sha2::{Digest, Sha256};
use std::path::Path;

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

/// Hash the four dataset files in schema order.
pub fn dataset_sha256(dataset_dir: &Path) -> Result<String, String> {
    let mut all = Vec::new();
    for file in [
        agora_core::dataset::UNIVERSE_FILE,
        agora_core::dataset::CUSTOMERS_FILE,
        agora_core::dataset::BUSINESSES_FILE,
        agora_core::dataset::GROUND_TRUTH_FILE,
    ] {
        let path = dataset_dir.join(file);
        all.extend(std::fs::read(&path).map_err(|e| format!("cannot hash {}: {e}", path.display()))?);
    }
    Ok(sha256_hex(&all))
}

pub fn write_manifest(
    out_dir: &Path,
    dataset_dir: &Path,
    study_file: &StudyFile,
    report: &ExperimentReport,
) -> Result<(), String> {
    let resolved_config = serde_json::to_vec(study_file).expect("study file serializes");
    let manifest = serde_json::json!({
        "schema_version": agora_core::dataset::SCHEMA_VERSION,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "study": report.study,
        "dataset_dir": dataset_dir.display().to_string(),
        "dataset_sha256": dataset_sha256(dataset_dir)?,
        "config_sha256": sha256_hex(&resolved_config),
        "resolved_config": study_file,
        "seeds": report.seeds,
        "runs": report.runs,
        "artifacts": ["report.json", "summary.csv"],
    });
    let path = out_dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap() + "\n")
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}
