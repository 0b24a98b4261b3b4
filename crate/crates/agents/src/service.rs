//! Rule-based service agent: polls its mailbox, answers inquiries
//! truthfully from its business record, and responds to purchase intent
//! with an order proposal priced off its menu. Runs until told to stop.

use crate::client::{AgentError, MarketClient};
use crate::dialogue::{build_reply, is_decline, parse_inquiry};
use agora_core::domain::{BusinessRecord, LineItem};
use agora_core::protocol::MessagePayload;
use std::sync::Arc;
use std::time::Duration;
use tokio::sync::watch;

/// Serializes proposal sends across the services of one trial so proposals
/// arrive in a fixed rank order regardless of task scheduling.
pub struct ProposalSequencer {
    turn: watch::Sender<u8>,
}

impl ProposalSequencer {
    #[allow(clippy::new_without_default)]
    pub fn new() -> Arc<Self> {
        let (turn, _) = watch::channel(0);
        Arc::new(ProposalSequencer { turn })
    }

    /// Block until every lower rank has sent. Rank 1 passes immediately.
    pub async fn wait_for_turn(&self, rank: u8) {
        let mut rx = self.turn.subscribe();
        let _ = rx.wait_for(|v| *v + 1 >= rank).await;
    }

    pub fn advance(&self) {
        self.turn.send_modify(|v| *v += 1);
    }
}

#[derive(Clone)]
pub struct ServiceBehavior {
    pub poll_interval: Duration,
    /// Response-delay rank for the proposal-bias harness: the service holds
    /// its proposal until every lower rank has sent.
    pub proposal_gate: Option<(u8, Arc<ProposalSequencer>)>,
    /// Amenity labels recognized in free-form inquiries.
    pub amenity_vocabulary: Vec<String>,
}

impl Default for ServiceBehavior {
    fn default() -> Self {
        ServiceBehavior {
            // Keeps aggregate poll load manageable with hundreds of
            // services live on small machines.
            poll_interval: Duration::from_millis(25),
            proposal_gate: None,
            amenity_vocabulary: Vec::new(),
        }
    }
}

/// What the service did during its run; `conversations` feeds the
/// truthfulness linter in tests.
#[derive(Debug, Default)]
pub struct ServiceStats {
    pub replies_sent: u32,
    pub proposals_sent: u32,
    pub payments_received: u32,
    /// (inquiry text, reply text) pairs.
    pub conversations: Vec<(String, String)>,
}

/// Poll-and-respond loop. Returns when `shutdown` flips to true.
pub async fn run_service_agent(
    client: MarketClient,
    business: BusinessRecord,
    behavior: ServiceBehavior,
    mut shutdown: watch::Receiver<bool>,
) -> Result<ServiceStats, AgentError> {
    let mut stats = ServiceStats::default();
    loop {
        if *shutdown.borrow() {
            return Ok(stats);
        }
        let messages = client.receive().await?;
        for envelope in messages {
            match envelope.payload {
                MessagePayload::Text { text } => {
                    let inquiry = parse_inquiry(&text, &business, &behavior.amenity_vocabulary);
                    let reply = build_reply(&business, &inquiry);
                    client.send_text(&envelope.sender, &reply).await?;
                    stats.replies_sent += 1;
                    stats.conversations.push((text, reply.clone()));

                    if !is_decline(&reply) {
                        let line_items: Vec<LineItem> = inquiry
                            .items
                            .iter()
                            .filter_map(|item| {
                                business.menu_price(item).map(|price| LineItem {
                                    item_name: item.clone(),
                                    quantity: 1,
                                    unit_price_cents: price,
                                })
                            })
                            .collect();
                        if let Some((rank, sequencer)) = &behavior.proposal_gate {
                            sequencer.wait_for_turn(*rank).await;
                            client.send_proposal(&envelope.sender, line_items).await?;
                            sequencer.advance();
                        } else {
                            client.send_proposal(&envelope.sender, line_items).await?;
                        }
                        stats.proposals_sent += 1;
                    }
                }
                MessagePayload::PaymentNotice { .. } => {
                    stats.payments_received += 1;
                }
                MessagePayload::OrderProposal { .. } => {
                    // Services never receive proposals; ignore defensively.
                }
            }
        }
        // Wake promptly on shutdown, otherwise poll again shortly.
        tokio::select! {
            _ = shutdown.changed() => {}
            _ = tokio::time::sleep(behavior.poll_interval) => {}
        }
    }
}

/// A service agent running as a background task.
pub struct ServiceHandle {
    shutdown: watch::Sender<bool>,
    join: tokio::task::JoinHandle<Result<ServiceStats, AgentError>>,
}

impl ServiceHandle {
    pub async fn stop(self) -> Result<ServiceStats, AgentError> {
        let _ = self.shutdown.send(true);
        self.join.await.expect("service task panicked")
    }
}

/// Register the business and spawn its polling loop.
pub async fn spawn_service_agent(
    http: reqwest::Client,
    base_url: &str,
    business: BusinessRecord,
    behavior: ServiceBehavior,
) -> Result<ServiceHandle, AgentError> {
    let client = MarketClient::register(http, base_url, &business.name, &business.description).await?;
    let (shutdown_tx, shutdown_rx) = watch::channel(false);
    let join = tokio::spawn(run_service_agent(client, business, behavior, shutdown_rx));
    Ok(ServiceHandle {
        shutdown: shutdown_tx,
        join,
    })
}
