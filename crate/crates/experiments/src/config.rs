//! Declarative study configuration file consumed by `agora run`. Flags
//! layered on top by the CLI override whatever the file sets.

use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Welfare,
    Consideration,
    Manipulation,
    Bias,
}

impl std::str::FromStr for StudyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "welfare" => Ok(StudyKind::Welfare),
            "consideration" => Ok(StudyKind::Consideration),
            "manipulation" => Ok(StudyKind::Manipulation),
            "bias" => Ok(StudyKind::Bias),
            other => Err(format!("unknown study {other:?}")),
        }
    }
}

impl std::fmt::Display for StudyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StudyKind::Welfare => write!(f, "welfare"),
            StudyKind::Consideration => write!(f, "consideration"),
            StudyKind::Manipulation => write!(f, "manipulation"),
            StudyKind::Bias => write!(f, "bias"),
        }
    }
}

/// The study file: every field beyond `study` is optional and falls back
/// to the study's defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct StudyFile {
    pub study: Option<StudyKind>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub parallelism: Option<usize>,
    /// Welfare: condition names.
    pub conditions: Option<Vec<String>>,
    /// Welfare: lexical fetch limit for the scripted assistant.
    pub lexical_fetch_limit: Option<usize>,
    /// Consideration: sweep values.
    pub result_limits: Option<Vec<usize>>,
    /// Manipulation: strategy names.
    pub strategies: Option<Vec<String>>,
    /// Bias: position | proposal.
    pub bias_kind: Option<String>,
    /// Bias: uniform-random | first-accepter.
    pub policy: Option<String>,
    /// Bias: trial count.
    pub trials: Option<usize>,
    /// Bias: subject customer id.
    pub customer_id: Option<String>,
}

impl StudyFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let bytes = std::fs::read(path)
            .map_err(|e| format!("cannot read study config {}: {e}", path.display()))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| format!("malformed study config {}: {e}", path.display()))
    }
}
