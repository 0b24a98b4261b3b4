//! Server configuration: port, per-agent action budget, search behavior,
//! and event-log destination. Loadable from a JSON file with CLI flag
//! overrides layered on top by the operator binary.

use agora_core::search::SearchConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServerConfig {
    /// TCP port; 0 binds an ephemeral port.
    pub port: u16,
    /// Cap on search/send actions per agent per run. Receive polling is
    /// exempt so service agents can idle without burning budget.
    pub action_budget: u32,
    pub search: SearchConfig,
    /// Line-delimited JSON event log; `None` keeps events in memory.
    pub event_log_path: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            port: 0,
            action_budget: 60,
            search: SearchConfig::lexical(),
            event_log_path: None,
        }
    }
}

impl ServerConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let bytes = std::fs::read(path)
            .map_err(|e| format!("cannot read server config {}: {e}", path.display()))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| format!("malformed server config {}: {e}", path.display()))
    }
}
