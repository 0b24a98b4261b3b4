//! Scripted protocol-driving assistant: searches (or takes an injected
//! consideration list), inquires with every discovered business, waits for
//! replies and proposals, and pays per its selector policy. It never reads
//! ground truth; fit is established from service replies and proposals.

use crate::client::{AgentError, MarketClient};
use crate::dialogue::{build_inquiry, is_decline, parse_amenity_answers};
use agora_core::domain::{CustomerNeed, OrderProposal};
use agora_core::economics::normalize_name;
use agora_core::money::Money;
use agora_core::protocol::MessagePayload;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::collections::BTreeMap;
use std::time::Duration;

/// How the assistant builds its consideration set.
#[derive(Debug, Clone)]
pub enum Discovery {
    /// Query the market's search action; lexical mode pages through results.
    Search {
        /// Stop once this many businesses are collected (None = all).
        fetch_limit: Option<usize>,
    },
    /// A pre-ordered consideration list injected by a harness (bias
    /// studies control presentation order this way).
    Provided(Vec<String>),
}

/// Payment policy over the fitting proposals.
#[derive(Debug, Clone)]
pub enum Selector {
    /// Pay the utility-maximizing fitting proposal if its utility is
    /// non-negative; abstain otherwise. Ties go to the lower agent name.
    UtilityMax,
    /// Wait for all contacted businesses, then pay a uniformly random
    /// fitting proposal (bias-harness calibration policy).
    UniformRandom { seed: u64 },
    /// Pay the first fitting proposal that arrives (satisficing).
    FirstProposal,
}

#[derive(Debug, Clone)]
pub struct ScriptedConfig {
    /// Registered agent name; experiment harnesses use the customer id.
    pub agent_name: String,
    pub discovery: Discovery,
    pub selector: Selector,
    pub poll_interval: Duration,
    /// Bound on receive polls while waiting for responses.
    pub max_polls: u32,
}

impl ScriptedConfig {
    pub fn new(agent_name: impl Into<String>) -> Self {
        ScriptedConfig {
            agent_name: agent_name.into(),
            discovery: Discovery::Search { fetch_limit: None },
            selector: Selector::UtilityMax,
            poll_interval: Duration::from_millis(3),
            max_polls: 2_000,
        }
    }
}

/// Outcome of one customer episode.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub customer_id: String,
    pub agent_name: String,
    pub transacted_business: Option<String>,
    pub proposal: Option<OrderProposal>,
    pub transaction_id: Option<String>,
    /// Realized utility: value x fit - price for the paid proposal, zero
    /// when the episode ends without a transaction.
    pub utility: Money,
    pub messages_sent: u32,
    pub messages_received: u32,
    pub contacted: Vec<String>,
    /// Consideration order presented to the agent (for bias accounting).
    pub consideration: Vec<String>,
    /// True when the episode aborted (transport error, budget, no
    /// registration); flagged episodes must never be silently scored.
    pub flagged: bool,
    pub trace: Vec<String>,
}

impl EpisodeResult {
    fn empty(need: &CustomerNeed, agent_name: &str) -> Self {
        EpisodeResult {
            customer_id: need.id.clone(),
            agent_name: agent_name.to_string(),
            transacted_business: None,
            proposal: None,
            transaction_id: None,
            utility: Money::ZERO,
            messages_sent: 0,
            messages_received: 0,
            contacted: Vec::new(),
            consideration: Vec::new(),
            flagged: false,
            trace: Vec::new(),
        }
    }
}

#[derive(Default)]
struct Contact {
    reply: Option<String>,
    proposal: Option<OrderProposal>,
    declined: bool,
}

impl Contact {
    fn resolved(&self) -> bool {
        self.declined || (self.reply.is_some() && self.proposal.is_some())
    }
}

/// Does the proposal satisfy the need, given what the service said about
/// its amenities? All desired items must appear among the line items and
/// every required amenity must have been answered "yes".
fn confirmed_fit(need: &CustomerNeed, contact: &Contact) -> bool {
    let Some(proposal) = &contact.proposal else {
        return false;
    };
    let items_ok = need
        .desired_item_names()
        .all(|item| proposal.contains_item(item));
    if !items_ok {
        return false;
    }
    let Some(reply) = &contact.reply else {
        return false;
    };
    let answers = parse_amenity_answers(reply);
    need.required_amenities
        .iter()
        .all(|req| answers.get(&normalize_name(req)).copied().unwrap_or(false))
}

/// Run one episode for `need` against a live market.
pub async fn run_scripted_assistant(
    http: reqwest::Client,
    base_url: &str,
    need: &CustomerNeed,
    config: &ScriptedConfig,
) -> EpisodeResult {
    let mut result = EpisodeResult::empty(need, &config.agent_name);
    let client = match MarketClient::register(http, base_url, &config.agent_name, "").await {
        Ok(c) => c,
        Err(e) => {
            result.flagged = true;
            result.trace.push(format!("registration failed: {e}"));
            return result;
        }
    };
    match drive_episode(&client, need, config, &mut result).await {
        Ok(()) => result,
        Err(e) => {
            result.flagged = true;
            result.trace.push(format!("episode aborted: {e}"));
            result
        }
    }
}

async fn drive_episode(
    client: &MarketClient,
    need: &CustomerNeed,
    config: &ScriptedConfig,
    result: &mut EpisodeResult,
) -> Result<(), AgentError> {
    // 1. Discovery.
    let consideration: Vec<String> = match &config.discovery {
        Discovery::Provided(names) => names.clone(),
        Discovery::Search { fetch_limit } => {
            let query: String = need.desired_item_names().collect::<Vec<_>>().join(" ");
            let mut names: Vec<String> = Vec::new();
            let mut page = 1;
            loop {
                let constraints = if page == 1 { String::new() } else { format!("page={page}") };
                let results = client.search(&query, &constraints).await?;
                let mut grew = false;
                for r in &results {
                    if !names.contains(&r.agent_name) {
                        names.push(r.agent_name.clone());
                        grew = true;
                    }
                }
                let done = results.is_empty()
                    || !grew
                    || fetch_limit.map(|l| names.len() >= l).unwrap_or(false);
                if done {
                    break;
                }
                page += 1;
            }
            if let Some(limit) = fetch_limit {
                names.truncate(*limit);
            }
            names
        }
    };
    result.consideration = consideration.clone();
    result.trace.push(format!("consideration set: {consideration:?}"));
    if consideration.is_empty() {
        return Ok(());
    }

    // 2. Inquire with every business under consideration.
    let items: Vec<String> = need.desired_item_names().map(String::from).collect();
    let amenities: Vec<String> = need.required_amenities.iter().cloned().collect();
    let inquiry = build_inquiry(&items, &amenities);
    let mut contacts: BTreeMap<String, Contact> = BTreeMap::new();
    for name in &consideration {
        client.send_text(name, &inquiry).await?;
        result.messages_sent += 1;
        result.contacted.push(name.clone());
        contacts.insert(name.clone(), Contact::default());
    }

    // 3. Drain responses until everyone resolved or the poll budget ends.
    let mut polls = 0;
    'waiting: while polls < config.max_polls {
        polls += 1;
        let messages = client.receive().await?;
        for envelope in messages {
            result.messages_received += 1;
            let Some(contact) = contacts.get_mut(&envelope.sender) else {
                continue;
            };
            match envelope.payload {
                MessagePayload::Text { text } => {
                    if is_decline(&text) {
                        contact.declined = true;
                    }
                    contact.reply = Some(text);
                }
                MessagePayload::OrderProposal { proposal } => {
                    contact.proposal = Some(proposal);
                    if matches!(config.selector, Selector::FirstProposal)
                        && confirmed_fit(need, contact)
                    {
                        let sender = envelope.sender.clone();
                        result.trace.push(format!("accepting first fitting proposal from {sender}"));
                        return settle(client, need, result, &sender, &contacts[&sender]).await;
                    }
                }
                MessagePayload::PaymentNotice { .. } => {}
            }
        }
        if contacts.values().all(Contact::resolved) {
            break 'waiting;
        }
        tokio::time::sleep(config.poll_interval).await;
    }

    // 4. Evaluate fitting proposals and settle per the selector.
    let fitting: Vec<(&String, &Contact)> = contacts
        .iter()
        .filter(|(_, c)| confirmed_fit(need, c))
        .collect();
    if fitting.is_empty() {
        result.trace.push("no fitting proposals; abstaining".into());
        return Ok(());
    }

    let chosen: Option<(&String, &Contact)> = match &config.selector {
        Selector::FirstProposal => None, // handled on arrival; nothing fit
        Selector::UniformRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Some(fitting[rng.gen_range(0..fitting.len())])
        }
        Selector::UtilityMax => {
            let best = fitting
                .iter()
                .min_by(|(na, ca), (nb, cb)| {
                    let pa = ca.proposal.as_ref().unwrap().total_price_cents;
                    let pb = cb.proposal.as_ref().unwrap().total_price_cents;
                    pa.cmp(&pb).then_with(|| na.cmp(nb))
                })
                .copied();
            match best {
                Some((name, contact)) => {
                    let price = contact.proposal.as_ref().unwrap().total_price_cents;
                    if need.value_cents >= price {
                        Some((name, contact))
                    } else {
                        result
                            .trace
                            .push(format!("best fitting price {price} exceeds value; abstaining"));
                        None
                    }
                }
                None => None,
            }
        }
    };

    if let Some((name, contact)) = chosen {
        let name = name.clone();
        return settle(client, need, result, &name, contact).await;
    }
    Ok(())
}

async fn settle(
    client: &MarketClient,
    need: &CustomerNeed,
    result: &mut EpisodeResult,
    business_name: &str,
    contact: &Contact,
) -> Result<(), AgentError> {
    let proposal = contact.proposal.clone().expect("settle requires a proposal");
    let transaction_id = client.pay(business_name, &proposal.proposal_id).await?;
    result.utility = need.value_cents - proposal.total_price_cents;
    result.transacted_business = Some(business_name.to_string());
    result.transaction_id = Some(transaction_id);
    result.proposal = Some(proposal);
    Ok(())
}
