//! Post-run audit: every reported welfare figure must be recomputable from
//! the run's raw event log through the core utility functions alone.

use agora_core::dataset::Dataset;
use agora_core::domain::OrderProposal;
use agora_core::economics::compute_utility;
use agora_core::money::Money;
use agora_server::EventRecord;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("payment references unknown proposal {0}")]
    UnknownProposal(String),
    #[error("payer {0} is not bound to a dataset customer")]
    UnboundPayer(String),
    #[error("payee {0} is not bound to a dataset business")]
    UnboundPayee(String),
    #[error("event log welfare {from_log} disagrees with reported welfare {reported}")]
    Mismatch { from_log: Money, reported: Money },
}

/// Replay the event log and recompute total consumer welfare: for every
/// payment, look up the settled proposal, resolve payer to a customer need
/// and payee to a business record, and apply the utility equation.
pub fn welfare_from_events(events: &[EventRecord], dataset: &Dataset) -> Result<Money, AuditError> {
    let mut customer_by_agent: HashMap<String, String> = HashMap::new();
    let mut business_by_agent: HashMap<String, String> = HashMap::new();
    let mut proposals: HashMap<String, OrderProposal> = HashMap::new();
    let mut welfare = Money::ZERO;

    for record in events {
        match record.kind.as_str() {
            "register" => {
                let agent = record.payload["agent_name"].as_str().unwrap_or_default().to_string();
                if let Some(customer) = record.payload["customer_id"].as_str() {
                    customer_by_agent.insert(agent.clone(), customer.to_string());
                }
                if let Some(business) = record.payload["business_id"].as_str() {
                    business_by_agent.insert(agent, business.to_string());
                }
            }
            "message" => {
                if record.payload["payload"]["type"] == "order_proposal" {
                    if let Ok(proposal) = serde_json::from_value::<OrderProposal>(
                        record.payload["payload"]["proposal"].clone(),
                    ) {
                        proposals.insert(proposal.proposal_id.clone(), proposal);
                    }
                }
            }
            "payment" => {
                let proposal_id = record.payload["proposal_id"].as_str().unwrap_or_default();
                let payer = record.payload["payer"].as_str().unwrap_or_default();
                let payee = record.payload["payee"].as_str().unwrap_or_default();
                let proposal = proposals
                    .get(proposal_id)
                    .ok_or_else(|| AuditError::UnknownProposal(proposal_id.to_string()))?;
                let customer_id = customer_by_agent
                    .get(payer)
                    .ok_or_else(|| AuditError::UnboundPayer(payer.to_string()))?;
                let need = dataset
                    .customer(customer_id)
                    .ok_or_else(|| AuditError::UnboundPayer(payer.to_string()))?;
                let business_id = business_by_agent
                    .get(payee)
                    .ok_or_else(|| AuditError::UnboundPayee(payee.to_string()))?;
                let business = dataset
                    .business(business_id)
                    .ok_or_else(|| AuditError::UnboundPayee(payee.to_string()))?;
                welfare += compute_utility(need, proposal, business);
            }
            _ => {}
        }
    }
    Ok(welfare)
}

/// Fail unless the log-derived welfare equals the reported figure exactly.
pub fn verify_welfare(
    events: &[EventRecord],
    dataset: &Dataset,
    reported: Money,
) -> Result<(), AuditError> {
    let from_log = welfare_from_events(events, dataset)?;
    if from_log != reported {
        return Err(AuditError::Mismatch { from_log, reported });
    }
    Ok(())
}
