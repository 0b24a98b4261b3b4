//! Typed HTTP client for the three market endpoints. One client per agent;
//! each agent loop keeps a single request in flight at a time.

use agora_core::protocol::{
    encode_request, ActionDescriptor, ActionEnvelope, ActionRequest, ErrorBody, MessageEnvelope,
    MessagesResponse, PaymentDetails, Pricing, ProposalDetails, RegisterRequest, RegisterResponse,
    SearchResponse, SearchResult, SendBody,
};
use agora_core::domain::LineItem;
use agora_core::money::Money;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("transport error: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("market rejected the request ({status}): {message}")]
    Rejected { status: u16, message: String },
    #[error("malformed market response: {0}")]
    MalformedResponse(String),
}

impl AgentError {
    pub fn status(&self) -> Option<u16> {
        match self {
            AgentError::Rejected { status, .. } => Some(*status),
            _ => None,
        }
    }
}

/// A registered connection to the market for one agent.
#[derive(Clone)]
pub struct MarketClient {
    http: reqwest::Client,
    base_url: String,
    agent_name: String,
    api_token: String,
}

impl MarketClient {
    /// Register `agent_name` and return a bound client.
    pub async fn register(
        http: reqwest::Client,
        base_url: &str,
        agent_name: &str,
        service_description: &str,
    ) -> Result<Self, AgentError> {
        let response = http
            .post(format!("{base_url}/register"))
            .json(&RegisterRequest {
                agent_name: agent_name.to_string(),
                service_description: service_description.to_string(),
            })
            .send()
            .await?;
        let status = response.status().as_u16();
        let bytes = response.bytes().await?;
        if status != 200 {
            return Err(rejected(status, &bytes));
        }
        let body: RegisterResponse = serde_json::from_slice(&bytes)
            .map_err(|e| AgentError::MalformedResponse(e.to_string()))?;
        Ok(MarketClient {
            http,
            base_url: base_url.to_string(),
            agent_name: agent_name.to_string(),
            api_token: body.api_token,
        })
    }

    pub fn agent_name(&self) -> &str {
        &self.agent_name
    }

    pub async fn fetch_protocol(&self) -> Result<Vec<ActionDescriptor>, AgentError> {
        let response = self
            .http
            .get(format!("{}/protocol", self.base_url))
            .send()
            .await?;
        let status = response.status().as_u16();
        let bytes = response.bytes().await?;
        if status != 200 {
            return Err(rejected(status, &bytes));
        }
        serde_json::from_slice(&bytes).map_err(|e| AgentError::MalformedResponse(e.to_string()))
    }

    /// Send a pre-built action request and parse the given response type.
    pub async fn action_raw(&self, request: ActionRequest) -> Result<(u16, Vec<u8>), AgentError> {
        let envelope = ActionEnvelope {
            api_token: self.api_token.clone(),
            request,
        };
        let response = self
            .http
            .post(format!("{}/action", self.base_url))
            .header("content-type", "application/json")
            .body(encode_request(&envelope))
            .send()
            .await?;
        let status = response.status().as_u16();
        let bytes = response.bytes().await?;
        Ok((status, bytes.to_vec()))
    }

    async fn action<T: serde::de::DeserializeOwned>(
        &self,
        request: ActionRequest,
    ) -> Result<T, AgentError> {
        let (status, bytes) = self.action_raw(request).await?;
        if status != 200 {
            return Err(rejected(status, &bytes));
        }
        serde_json::from_slice(&bytes).map_err(|e| AgentError::MalformedResponse(e.to_string()))
    }

    pub async fn search(&self, query: &str, constraints: &str) -> Result<Vec<SearchResult>, AgentError> {
        let response: SearchResponse = self
            .action(ActionRequest::Search {
                query: query.to_string(),
                constraints: constraints.to_string(),
            })
            .await?;
        Ok(response.results)
    }

    pub async fn send_text(&self, recipient: &str, text: &str) -> Result<String, AgentError> {
        let response: agora_core::protocol::MessageIdResponse = self
            .action(ActionRequest::Send {
                recipient_id: recipient.to_string(),
                body: SendBody::Text { text: text.to_string() },
            })
            .await?;
        Ok(response.message_id)
    }

    pub async fn send_proposal(
        &self,
        recipient: &str,
        items: Vec<LineItem>,
    ) -> Result<String, AgentError> {
        let total: Money = items
            .iter()
            .map(|li| li.unit_price_cents * i64::from(li.quantity))
            .sum();
        let response: agora_core::protocol::MessageIdResponse = self
            .action(ActionRequest::Send {
                recipient_id: recipient.to_string(),
                body: SendBody::OrderProposal(ProposalDetails {
                    items,
                    pricing: Pricing {
                        total_cents: total,
                        currency: "USD".to_string(),
                    },
                }),
            })
            .await?;
        Ok(response.message_id)
    }

    pub async fn pay(&self, recipient: &str, proposal_id: &str) -> Result<String, AgentError> {
        let response: agora_core::protocol::TransactionIdResponse = self
            .action(ActionRequest::Send {
                recipient_id: recipient.to_string(),
                body: SendBody::Pay(PaymentDetails {
                    proposal_id: proposal_id.to_string(),
                    method: "simulated".to_string(),
                }),
            })
            .await?;
        Ok(response.transaction_id)
    }

    pub async fn receive(&self) -> Result<Vec<MessageEnvelope>, AgentError> {
        let response: MessagesResponse = self.action(ActionRequest::Receive).await?;
        Ok(response.messages)
    }
}

fn rejected(status: u16, bytes: &[u8]) -> AgentError {
    let message = serde_json::from_slice::<ErrorBody>(bytes)
        .map(|b| b.error)
        .unwrap_or_else(|_| String::from_utf8_lossy(bytes).to_string());
    AgentError::Rejected { status, message }
}
