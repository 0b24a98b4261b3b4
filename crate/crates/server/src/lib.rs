//! The agora market environment server: registration registry, action
//! router, per-agent mailboxes, search dispatch, transaction ledger, and a
//! per-run append-only event log.

pub mod config;
pub mod eventlog;
pub mod http;
pub mod state;

pub use config::ServerConfig;
pub use eventlog::{read_event_log, EventLog, EventRecord};
pub use http::{router, spawn, ServerHandle};
pub use state::{ActionOutcome, ApiError, MarketState};
