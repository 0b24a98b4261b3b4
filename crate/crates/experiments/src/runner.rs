//! Shared orchestration: bring up an in-process market with every service
//! agent live, run one scripted episode per customer with bounded
//! parallelism, then tear everything down and hand back the episodes,
//! ledger, and event log.

use agora_agents::scripted::{run_scripted_assistant, EpisodeResult, ScriptedConfig};
use agora_agents::service::{spawn_service_agent, ServiceBehavior};
use agora_core::dataset::Dataset;
use agora_core::domain::Transaction;
use agora_core::money::Money;
use agora_core::search::SearchConfig;
use agora_server::{spawn, EventRecord, MarketState, ServerConfig};
use std::path::PathBuf;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("failed to start market server: {0}")]
    Serve(#[from] std::io::Error),
    #[error("service agent failed: {0}")]
    Service(#[from] agora_agents::AgentError),
    #[error("event log unavailable for audit")]
    MissingEvents,
    #[error(transparent)]
    Audit(#[from] crate::audit::AuditError),
}

pub struct MarketRunConfig {
    pub search: SearchConfig,
    pub action_budget: u32,
    pub parallelism: usize,
    pub event_log_path: Option<PathBuf>,
}

impl Default for MarketRunConfig {
    fn default() -> Self {
        MarketRunConfig {
            search: SearchConfig::perfect(),
            action_budget: 10_000,
            parallelism: 8,
            event_log_path: None,
        }
    }
}

pub struct MarketRun {
    pub episodes: Vec<EpisodeResult>,
    pub events: Vec<EventRecord>,
    pub transactions: Vec<Transaction>,
}

impl MarketRun {
    pub fn total_welfare(&self) -> Money {
        self.episodes.iter().map(|e| e.utility).sum()
    }

    pub fn total_revenue(&self) -> Money {
        self.transactions.iter().map(|t| t.amount_cents).sum()
    }

    pub fn flagged(&self) -> bool {
        self.episodes.iter().any(|e| e.flagged)
    }

    pub fn messages_per_customer(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.episodes.iter().map(|e| e.messages_sent as f64).sum::<f64>()
            / self.episodes.len() as f64
    }

    pub fn businesses_contacted_per_customer(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.episodes.iter().map(|e| e.contacted.len() as f64).sum::<f64>()
            / self.episodes.len() as f64
    }

    /// Exact audit of the reported welfare against the raw event log.
    pub fn audit(&self, dataset: &Dataset) -> Result<(), crate::audit::AuditError> {
        crate::audit::verify_welfare(&self.events, dataset, self.total_welfare())
    }
}

/// Run one scripted episode per dataset customer against a fresh market
/// with all service agents live. `make_config` shapes each customer's
/// assistant (selector, discovery, limits).
pub async fn run_market_episodes(
    dataset: &Dataset,
    run_config: MarketRunConfig,
    make_config: impl Fn(&agora_core::domain::CustomerNeed) -> ScriptedConfig,
) -> Result<MarketRun, RunnerError> {
    let mut server_config = ServerConfig::default();
    server_config.search = run_config.search.clone();
    server_config.action_budget = run_config.action_budget;
    server_config.event_log_path = run_config.event_log_path.clone();
    let state = MarketState::new(Arc::new(dataset.clone()), server_config);
    let server = spawn(state).await?;
    let base_url = server.base_url();
    let http = reqwest::Client::new();

    let mut services = Vec::with_capacity(dataset.businesses.len());
    for business in &dataset.businesses {
        services.push(
            spawn_service_agent(
                http.clone(),
                &base_url,
                business.clone(),
                ServiceBehavior::default(),
            )
            .await?,
        );
    }

    // Bounded-parallel episodes, collected back into customer order.
    let semaphore = Arc::new(tokio::sync::Semaphore::new(run_config.parallelism.max(1)));
    let mut join_set = tokio::task::JoinSet::new();
    for (index, need) in dataset.customers.iter().enumerate() {
        let permit_source = Arc::clone(&semaphore);
        let http = http.clone();
        let base_url = base_url.clone();
        let need = need.clone();
        let config = make_config(&need);
        join_set.spawn(async move {
            let _permit = permit_source.acquire_owned().await.expect("semaphore open");
            (index, run_scripted_assistant(http, &base_url, &need, &config).await)
        });
    }
    let mut episodes: Vec<Option<EpisodeResult>> = vec![None; dataset.customers.len()];
    while let Some(joined) = join_set.join_next().await {
        let (index, episode) = joined.expect("episode task panicked");
        episodes[index] = Some(episode);
    }
    let episodes: Vec<EpisodeResult> = episodes.into_iter().map(|e| e.unwrap()).collect();

    for service in services {
        service.stop().await?;
    }
    let transactions = server.state().ledger_transactions();
    let memory_events = server.state().event_log().memory_records();
    let log_path = run_config.event_log_path.clone();
    server.shutdown().await;

    let events = match (memory_events, log_path) {
        (Some(events), _) => events,
        (None, Some(path)) => agora_server::read_event_log(&path)?,
        (None, None) => return Err(RunnerError::MissingEvents),
    };

    Ok(MarketRun {
        episodes,
        events,
        transactions,
    })
}
