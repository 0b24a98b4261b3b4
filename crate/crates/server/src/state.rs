//! The market environment's state: agent registry, per-agent mailboxes,
//! the proposal registry, the append-only transaction ledger, and search
//! dispatch. Each structure is individually linearizable; cross-agent
//! operations impose no ordering beyond per-mailbox sequence numbers and
//! ledger append order.

use crate::config::ServerConfig;
use crate::eventlog::{EventLog, EVENT_MESSAGE, EVENT_PAYMENT, EVENT_REGISTER};
use agora_core::dataset::Dataset;
use agora_core::domain::{BusinessRecord, OrderProposal, Transaction};
use agora_core::economics::normalize_name;
use agora_core::money::Money;
use agora_core::protocol::{
    capability_check, decode_request, ActionRequest, MessageEnvelope, MessagePayload,
    MessageIdResponse, MessagesResponse, PaymentDetails, ProposalDetails, RegisterRequest,
    RegisterResponse, Role, SearchResponse, SearchResult, SendBody, TransactionIdResponse,
};
use agora_core::search::{parse_page_constraint, perfect_search, SearchIndex, SearchMode};
use parking_lot::{Mutex, RwLock};
use serde_json::json;
use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ApiError {
    #[error("{0}")]
    Validation(String),
    #[error("invalid api_token")]
    InvalidToken,
    #[error("{0}")]
    CapabilityDenied(String),
    #[error("proposal {0} is addressed to another agent")]
    NotProposalRecipient(String),
    #[error("unknown recipient {0:?}")]
    UnknownRecipient(String),
    #[error("unknown proposal {0:?}")]
    UnknownProposal(String),
    #[error("proposal {0} already paid")]
    AlreadyPaid(String),
    #[error("agent name {0:?} already registered")]
    DuplicateAgentName(String),
    #[error("action budget exhausted")]
    BudgetExhausted,
}

impl ApiError {
    pub fn status(&self) -> u16 {
        match self {
            ApiError::Validation(_) => 400,
            ApiError::InvalidToken => 401,
            ApiError::CapabilityDenied(_) | ApiError::NotProposalRecipient(_) => 403,
            ApiError::UnknownRecipient(_) | ApiError::UnknownProposal(_) => 404,
            ApiError::AlreadyPaid(_) | ApiError::DuplicateAgentName(_) => 409,
            ApiError::BudgetExhausted => 429,
        }
    }
}

/// A registered agent. The agent id is its registered name; tokens map
/// one-to-one onto ids.
#[derive(Clone)]
pub struct AgentRegistration {
    pub agent_id: String,
    pub role: Role,
    pub api_token: String,
    pub service_description: String,
    /// Bound business record (service agents).
    pub business: Option<Arc<BusinessRecord>>,
    /// Bound customer need id (assistants registered under a customer id).
    pub customer_id: Option<String>,
    actions_used: Arc<AtomicU32>,
}

#[derive(Default)]
struct Registry {
    by_name: HashMap<String, AgentRegistration>,
    by_token: HashMap<String, String>,
}

struct MailboxInner {
    next_sequence: u64,
    queue: VecDeque<MessageEnvelope>,
    delivered_watermark: u64,
}

type Mailbox = Arc<Mutex<MailboxInner>>;

#[derive(Default)]
struct LedgerInner {
    transactions: Vec<Transaction>,
    paid_proposals: HashMap<String, String>,
}

/// One service listing snapshot used by both search modes.
struct ServiceListing {
    agent_name: String,
    description: String,
    business: Arc<BusinessRecord>,
}

pub enum ActionOutcome {
    Search(SearchResponse),
    MessageId(MessageIdResponse),
    TransactionId(TransactionIdResponse),
    Messages(MessagesResponse),
}

impl ActionOutcome {
    pub fn into_json(self) -> serde_json::Value {
        match self {
            ActionOutcome::Search(r) => serde_json::to_value(r).unwrap(),
            ActionOutcome::MessageId(r) => serde_json::to_value(r).unwrap(),
            ActionOutcome::TransactionId(r) => serde_json::to_value(r).unwrap(),
            ActionOutcome::Messages(r) => serde_json::to_value(r).unwrap(),
        }
    }
}

pub struct MarketState {
    config: ServerConfig,
    dataset: Arc<Dataset>,
    registry: RwLock<Registry>,
    mailboxes: RwLock<HashMap<String, Mailbox>>,
    proposals: RwLock<HashMap<String, OrderProposal>>,
    ledger: Mutex<LedgerInner>,
    listings: RwLock<Arc<Vec<ServiceListing>>>,
    search_index: RwLock<Arc<SearchIndex>>,
    event_log: EventLog,
    message_seq: AtomicU64,
    proposal_seq: AtomicU64,
    transaction_seq: AtomicU64,
}

impl MarketState {
    pub fn new(dataset: Arc<Dataset>, config: ServerConfig) -> Arc<Self> {
        let event_log = match &config.event_log_path {
            Some(path) => EventLog::to_file(path).unwrap_or_else(|e| {
                tracing::error!("cannot open event log {}: {e}; logging in memory", path.display());
                EventLog::in_memory()
            }),
            None => EventLog::in_memory(),
        };
        Arc::new(MarketState {
            config,
            dataset,
            registry: RwLock::new(Registry::default()),
            mailboxes: RwLock::new(HashMap::new()),
            proposals: RwLock::new(HashMap::new()),
            ledger: Mutex::new(LedgerInner::default()),
            listings: RwLock::new(Arc::new(Vec::new())),
            search_index: RwLock::new(Arc::new(SearchIndex::default())),
            event_log,
            message_seq: AtomicU64::new(1),
            proposal_seq: AtomicU64::new(1),
            transaction_seq: AtomicU64::new(1),
        })
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    pub fn event_log(&self) -> &EventLog {
        &self.event_log
    }

    /// Register an agent. The role binding is inferred from the dataset:
    /// names matching a business become service agents bound to that
    /// record; names matching a customer id become assistants bound to that
    /// need; anything else is a browsing-only assistant.
    pub fn register(&self, request: &RegisterRequest) -> Result<RegisterResponse, ApiError> {
        if request.agent_name.trim().is_empty() {
            return Err(ApiError::Validation("agent_name must be non-empty".into()));
        }

        let business = self
            .dataset
            .businesses
            .iter()
            .find(|b| {
                b.id == request.agent_name
                    || normalize_name(&b.name) == normalize_name(&request.agent_name)
            })
            .cloned()
            .map(Arc::new);
        let customer_id = if business.is_none() {
            self.dataset
                .customers
                .iter()
                .find(|c| c.id == request.agent_name)
                .map(|c| c.id.clone())
        } else {
            None
        };
        let role = if business.is_some() { Role::Service } else { Role::Assistant };

        let token = uuid::Uuid::new_v4().simple().to_string();
        let registration = AgentRegistration {
            agent_id: request.agent_name.clone(),
            role,
            api_token: token.clone(),
            service_description: request.service_description.clone(),
            business,
            customer_id,
            actions_used: Arc::new(AtomicU32::new(0)),
        };

        {
            let mut registry = self.registry.write();
            if registry.by_name.contains_key(&registration.agent_id) {
                return Err(ApiError::DuplicateAgentName(registration.agent_id.clone()));
            }
            registry
                .by_token
                .insert(token.clone(), registration.agent_id.clone());
            registry
                .by_name
                .insert(registration.agent_id.clone(), registration.clone());
        }
        self.mailboxes.write().insert(
            registration.agent_id.clone(),
            Arc::new(Mutex::new(MailboxInner {
                next_sequence: 1,
                queue: VecDeque::new(),
                delivered_watermark: 0,
            })),
        );
        if registration.role == Role::Service {
            self.rebuild_listings();
        }

        self.event_log.append(
            EVENT_REGISTER,
            json!({
                "agent_name": registration.agent_id,
                "role": registration.role,
                "business_id": registration.business.as_ref().map(|b| b.id.clone()),
                "customer_id": registration.customer_id,
            }),
        );
        Ok(RegisterResponse { api_token: token })
    }

    /// Swap in fresh search snapshots so a service is discoverable as soon
    /// as its register response returns.
    fn rebuild_listings(&self) {
        let registry = self.registry.read();
        let mut listings: Vec<ServiceListing> = registry
            .by_name
            .values()
            .filter_map(|agent| {
                agent.business.as_ref().map(|b| ServiceListing {
                    agent_name: agent.agent_id.clone(),
                    description: agent.service_description.clone(),
                    business: Arc::clone(b),
                })
            })
            .collect();
        listings.sort_by(|a, b| a.business.id.cmp(&b.business.id));
        let index = SearchIndex::build(
            listings
                .iter()
                .map(|l| (l.agent_name.as_str(), l.description.as_str(), l.business.as_ref())),
        );
        *self.listings.write() = Arc::new(listings);
        *self.search_index.write() = Arc::new(index);
    }

    pub fn agent_by_token(&self, token: &str) -> Option<AgentRegistration> {
        let registry = self.registry.read();
        let name = registry.by_token.get(token)?;
        registry.by_name.get(name).cloned()
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentRegistration> {
        self.registry.read().by_name.get(name).cloned()
    }

    /// Route one decoded-and-authenticated action. Every accepted action is
    /// reflected in server state (and the event log) before this returns.
    pub fn route_action(&self, raw_body: &[u8]) -> Result<ActionOutcome, ApiError> {
        let envelope =
            decode_request(raw_body).map_err(|e| ApiError::Validation(e.to_string()))?;
        let agent = self
            .agent_by_token(&envelope.api_token)
            .ok_or(ApiError::InvalidToken)?;
        capability_check(agent.role, &envelope.request)
            .map_err(|e| ApiError::CapabilityDenied(e.to_string()))?;

        // Receive polling is exempt from the budget; everything else spends.
        if !matches!(envelope.request, ActionRequest::Receive) {
            let used = agent.actions_used.fetch_add(1, Ordering::SeqCst);
            if used >= self.config.action_budget {
                return Err(ApiError::BudgetExhausted);
            }
        }

        match envelope.request {
            ActionRequest::Search { query, constraints } => Ok(ActionOutcome::Search(
                self.search(&agent, &query, &constraints)?,
            )),
            ActionRequest::Send { recipient_id, body } => match body {
                SendBody::Text { text } => {
                    let id = self.deliver(
                        &agent.agent_id,
                        &recipient_id,
                        MessagePayload::Text { text },
                    )?;
                    Ok(ActionOutcome::MessageId(MessageIdResponse { message_id: id }))
                }
                SendBody::OrderProposal(details) => {
                    let id = self.deliver_proposal(&agent.agent_id, &recipient_id, details)?;
                    Ok(ActionOutcome::MessageId(MessageIdResponse { message_id: id }))
                }
                SendBody::Pay(payment) => Ok(ActionOutcome::TransactionId(
                    self.pay(&agent.agent_id, &recipient_id, &payment)?,
                )),
            },
            ActionRequest::Receive => Ok(ActionOutcome::Messages(self.drain_mailbox(&agent.agent_id))),
        }
    }

    fn search(
        &self,
        agent: &AgentRegistration,
        query: &str,
        constraints: &str,
    ) -> Result<SearchResponse, ApiError> {
        match self.config.search.mode {
            SearchMode::Lexical => {
                let page = parse_page_constraint(constraints);
                let index = Arc::clone(&self.search_index.read());
                let results = index
                    .lexical_search(query, page, &self.config.search)
                    .into_iter()
                    .map(|entry| SearchResult {
                        agent_name: entry.agent_name.clone(),
                        description: entry.description.clone(),
                    })
                    .collect();
                Ok(SearchResponse { results })
            }
            SearchMode::Perfect => {
                let customer_id = agent.customer_id.as_ref().ok_or_else(|| {
                    ApiError::Validation(
                        "perfect search requires an assistant registered under a customer id"
                            .into(),
                    )
                })?;
                let need = self
                    .dataset
                    .customer(customer_id)
                    .ok_or_else(|| ApiError::Validation(format!("unknown customer {customer_id}")))?;
                let listings = Arc::clone(&self.listings.read());
                let limit = self.config.search.result_limit.unwrap_or(3);
                let ranked = perfect_search(need, listings.iter().map(|l| l.business.as_ref()), limit);
                let results = ranked
                    .into_iter()
                    .filter_map(|business| {
                        listings
                            .iter()
                            .find(|l| l.business.id == business.id)
                            .map(|l| SearchResult {
                                agent_name: l.agent_name.clone(),
                                description: l.description.clone(),
                            })
                    })
                    .collect();
                Ok(SearchResponse { results })
            }
        }
    }

    /// Append an envelope to the recipient's mailbox under its per-mailbox
    /// lock, which serializes sequence assignment.
    fn deliver(
        &self,
        sender: &str,
        recipient: &str,
        payload: MessagePayload,
    ) -> Result<String, ApiError> {
        let mailbox = self
            .mailboxes
            .read()
            .get(recipient)
            .cloned()
            .ok_or_else(|| ApiError::UnknownRecipient(recipient.to_string()))?;

        let message_id = format!("m{:06}", self.message_seq.fetch_add(1, Ordering::SeqCst));
        let envelope = {
            let mut inner = mailbox.lock();
            let envelope = MessageEnvelope {
                message_id: message_id.clone(),
                sender: sender.to_string(),
                recipient: recipient.to_string(),
                sequence: inner.next_sequence,
                payload,
            };
            inner.next_sequence += 1;
            inner.queue.push_back(envelope.clone());
            envelope
        };
        self.event_log
            .append(EVENT_MESSAGE, serde_json::to_value(&envelope).unwrap());
        Ok(message_id)
    }

    fn deliver_proposal(
        &self,
        sender: &str,
        recipient: &str,
        details: ProposalDetails,
    ) -> Result<String, ApiError> {
        if details.items.is_empty() {
            return Err(ApiError::Validation(
                "order proposal needs at least one line item".into(),
            ));
        }
        let proposal_id = format!("prop-{:06}", self.proposal_seq.fetch_add(1, Ordering::SeqCst));
        let proposal = OrderProposal {
            proposal_id: proposal_id.clone(),
            from_agent: sender.to_string(),
            to_agent: recipient.to_string(),
            line_items: details.items,
            total_price_cents: details.pricing.total_cents,
        };
        proposal
            .validate()
            .map_err(|e| ApiError::Validation(format!("invalid order proposal: {e}")))?;

        // Recipient existence is checked by deliver; only record the
        // proposal once the envelope is accepted.
        let message_id = self.deliver(
            sender,
            recipient,
            MessagePayload::OrderProposal {
                proposal: proposal.clone(),
            },
        )?;
        self.proposals.write().insert(proposal_id, proposal);
        Ok(message_id)
    }

    /// Settle a proposal exactly once: the paid-set check and the ledger
    /// append happen under one lock, so concurrent duplicates see a
    /// conflict. The payee is notified through its mailbox.
    fn pay(
        &self,
        payer: &str,
        recipient: &str,
        payment: &PaymentDetails,
    ) -> Result<TransactionIdResponse, ApiError> {
        let proposal = self
            .proposals
            .read()
            .get(&payment.proposal_id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownProposal(payment.proposal_id.clone()))?;
        if proposal.to_agent != payer {
            return Err(ApiError::NotProposalRecipient(payment.proposal_id.clone()));
        }
        if proposal.from_agent != recipient {
            return Err(ApiError::Validation(format!(
                "recipient_id {recipient:?} does not match the proposal's sender {:?}",
                proposal.from_agent
            )));
        }

        let transaction = {
            let mut ledger = self.ledger.lock();
            if ledger.paid_proposals.contains_key(&proposal.proposal_id) {
                return Err(ApiError::AlreadyPaid(proposal.proposal_id.clone()));
            }
            let transaction = Transaction {
                transaction_id: format!(
                    "t{:06}",
                    self.transaction_seq.fetch_add(1, Ordering::SeqCst)
                ),
                proposal_id: proposal.proposal_id.clone(),
                payer: payer.to_string(),
                payee: proposal.from_agent.clone(),
                amount_cents: proposal.total_price_cents,
                timestamp: ledger.transactions.len() as u64 + 1,
            };
            ledger
                .paid_proposals
                .insert(proposal.proposal_id.clone(), transaction.transaction_id.clone());
            ledger.transactions.push(transaction.clone());
            transaction
        };

        self.event_log
            .append(EVENT_PAYMENT, serde_json::to_value(&transaction).unwrap());

        // Notify the payee; it registered (it sent the proposal), so the
        // mailbox exists.
        let _ = self.deliver(
            payer,
            &proposal.from_agent,
            MessagePayload::PaymentNotice {
                transaction_id: transaction.transaction_id.clone(),
                proposal_id: proposal.proposal_id.clone(),
                amount_cents: transaction.amount_cents,
                payer: payer.to_string(),
            },
        );

        Ok(TransactionIdResponse {
            transaction_id: transaction.transaction_id,
        })
    }

    /// Return everything past the delivered watermark in sequence order and
    /// advance the watermark. An empty mailbox yields an empty list.
    fn drain_mailbox(&self, agent_id: &str) -> MessagesResponse {
        let mailbox = match self.mailboxes.read().get(agent_id).cloned() {
            Some(m) => m,
            None => return MessagesResponse { messages: Vec::new() },
        };
        let mut inner = mailbox.lock();
        let messages: Vec<MessageEnvelope> = inner.queue.drain(..).collect();
        if let Some(last) = messages.last() {
            inner.delivered_watermark = last.sequence;
        }
        MessagesResponse { messages }
    }

    // -- inspection helpers used by experiments and tests ------------------

    pub fn ledger_transactions(&self) -> Vec<Transaction> {
        self.ledger.lock().transactions.clone()
    }

    pub fn proposal(&self, proposal_id: &str) -> Option<OrderProposal> {
        self.proposals.read().get(proposal_id).cloned()
    }

    pub fn paid_proposal_total(&self) -> Money {
        let ledger = self.ledger.lock();
        let proposals = self.proposals.read();
        ledger
            .paid_proposals
            .keys()
            .filter_map(|id| proposals.get(id))
            .map(|p| p.total_price_cents)
            .sum()
    }

    pub fn registered_service_count(&self) -> usize {
        self.listings.read().len()
    }
}
