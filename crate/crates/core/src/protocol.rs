//! Wire-level contract for the market's three HTTP endpoints: the action
//! request union, message envelopes, response shapes, codecs, the protocol
//! descriptor list served by `GET /protocol`, and the role capability matrix.
//!
//! Requests travel as JSON over `POST /action` with a unified structure:
//! every request carries `api_token` and `action`, followed by
//! action-specific fields. Encoding is canonical (fixed key order) so logs
//! are byte-reproducible.

use crate::domain::{LineItem, OrderProposal};
use crate::money::Money;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

/// The two sides of the market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Assistant,
    Service,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Role::Assistant => write!(f, "assistant"),
            Role::Service => write!(f, "service"),
        }
    }
}

// ---------------------------------------------------------------------------
// Register

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterRequest {
    pub agent_name: String,
    pub service_description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterResponse {
    pub api_token: String,
}

/// Error body shared by every endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

// ---------------------------------------------------------------------------
// Action requests

/// A decoded `/action` request: the bearer token plus the action union.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionEnvelope {
    pub api_token: String,
    pub request: ActionRequest,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionRequest {
    Search { query: String, constraints: String },
    Send { recipient_id: String, body: SendBody },
    Receive,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SendBody {
    Text { text: String },
    OrderProposal(ProposalDetails),
    Pay(PaymentDetails),
}

/// Structured offer body: line items plus a pricing block. The server
/// assigns the proposal id and the from/to binding on delivery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalDetails {
    pub items: Vec<LineItem>,
    pub pricing: Pricing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pricing {
    pub total_cents: Money,
    pub currency: String,
}

/// Payment body. `method` is recorded verbatim and uninterpreted; there is
/// a single simulated payment rail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaymentDetails {
    pub proposal_id: String,
    pub method: String,
}

impl ActionRequest {
    /// The action discriminator on the wire.
    pub fn action_name(&self) -> &'static str {
        match self {
            ActionRequest::Search { .. } => "search",
            ActionRequest::Send { .. } => "send",
            ActionRequest::Receive => "receive",
        }
    }

    /// The fully qualified descriptor name (send actions split by type).
    pub fn descriptor_name(&self) -> &'static str {
        match self {
            ActionRequest::Search { .. } => "search",
            ActionRequest::Send { body: SendBody::Text { .. }, .. } => "send_text",
            ActionRequest::Send { body: SendBody::OrderProposal(_), .. } => "send_order_proposal",
            ActionRequest::Send { body: SendBody::Pay(_), .. } => "send_payment",
            ActionRequest::Receive => "receive",
        }
    }
}

// ---------------------------------------------------------------------------
// Action responses

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub agent_name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub results: Vec<SearchResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageIdResponse {
    pub message_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransactionIdResponse {
    pub transaction_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessagesResponse {
    pub messages: Vec<MessageEnvelope>,
}

/// A delivered message. `sequence` is strictly increasing within one
/// recipient's mailbox.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageEnvelope {
    pub message_id: String,
    pub sender: String,
    pub recipient: String,
    pub sequence: u64,
    pub payload: MessagePayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MessagePayload {
    Text {
        text: String,
    },
    OrderProposal {
        proposal: OrderProposal,
    },
    PaymentNotice {
        transaction_id: String,
        proposal_id: String,
        amount_cents: Money,
        payer: String,
    },
}

// ---------------------------------------------------------------------------
// Codec

#[derive(Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("request must be a JSON object")]
    NotAnObject,
    #[error("missing {0}")]
    MissingField(&'static str),
    #[error("field {field} must be a {expected}")]
    FieldType {
        field: &'static str,
        expected: &'static str,
    },
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("unknown message_type {0:?}")]
    UnknownMessageType(String),
}

// Wire structs pin the canonical key order for each request shape.
#[derive(Serialize)]
struct SearchWire<'a> {
    api_token: &'a str,
    action: &'static str,
    query: &'a str,
    constraints: &'a str,
}

#[derive(Serialize)]
struct SendTextWire<'a> {
    api_token: &'a str,
    action: &'static str,
    recipient_id: &'a str,
    message_type: &'static str,
    text: &'a str,
}

#[derive(Serialize)]
struct SendProposalWire<'a> {
    api_token: &'a str,
    action: &'static str,
    recipient_id: &'a str,
    message_type: &'static str,
    order_proposal_details: &'a ProposalDetails,
}

#[derive(Serialize)]
struct SendPayWire<'a> {
    api_token: &'a str,
    action: &'static str,
    recipient_id: &'a str,
    message_type: &'static str,
    payment_details: &'a PaymentDetails,
}

#[derive(Serialize)]
struct ReceiveWire<'a> {
    api_token: &'a str,
    action: &'static str,
}

/// Encode an action envelope as canonical JSON bytes.
pub fn encode_request(envelope: &ActionEnvelope) -> Vec<u8> {
    let token = envelope.api_token.as_str();
    let value = match &envelope.request {
        ActionRequest::Search { query, constraints } => serde_json::to_vec(&SearchWire {
            api_token: token,
            action: "search",
            query,
            constraints,
        }),
        ActionRequest::Send { recipient_id, body } => match body {
            SendBody::Text { text } => serde_json::to_vec(&SendTextWire {
                api_token: token,
                action: "send",
                recipient_id,
                message_type: "text",
                text,
            }),
            SendBody::OrderProposal(details) => serde_json::to_vec(&SendProposalWire {
                api_token: token,
                action: "send",
                recipient_id,
                message_type: "order_proposal",
                order_proposal_details: details,
            }),
            SendBody::Pay(payment) => serde_json::to_vec(&SendPayWire {
                api_token: token,
                action: "send",
                recipient_id,
                message_type: "pay",
                payment_details: payment,
            }),
        },
        ActionRequest::Receive => serde_json::to_vec(&ReceiveWire {
            api_token: token,
            action: "receive",
        }),
    };
    value.expect("wire structs always serialize")
}

fn req_str(obj: &serde_json::Map<String, Value>, field: &'static str) -> Result<String, ValidationError> {
    match obj.get(field) {
        None => Err(ValidationError::MissingField(field)),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(ValidationError::FieldType {
            field,
            expected: "string",
        }),
    }
}

fn req_object<'v>(
    obj: &'v serde_json::Map<String, Value>,
    field: &'static str,
) -> Result<&'v Value, ValidationError> {
    match obj.get(field) {
        None => Err(ValidationError::MissingField(field)),
        Some(v @ Value::Object(_)) => Ok(v),
        Some(_) => Err(ValidationError::FieldType {
            field,
            expected: "object",
        }),
    }
}

/// Decode and validate `/action` request bytes. Unknown extra fields are
/// ignored so new optional fields never break old agents; unknown actions
/// are the only coupling a new action adds.
pub fn decode_request(bytes: &[u8]) -> Result<ActionEnvelope, ValidationError> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| ValidationError::MalformedJson(e.to_string()))?;
    let obj = value.as_object().ok_or(ValidationError::NotAnObject)?;

    let api_token = req_str(obj, "api_token")?;
    let action = req_str(obj, "action")?;

    let request = match action.as_str() {
        "search" => ActionRequest::Search {
            query: req_str(obj, "query")?,
            constraints: req_str(obj, "constraints")?,
        },
        "receive" => ActionRequest::Receive,
        "send" => {
            let recipient_id = req_str(obj, "recipient_id")?;
            let message_type = req_str(obj, "message_type")?;
            let body = match message_type.as_str() {
                "text" => SendBody::Text {
                    text: req_str(obj, "text")?,
                },
                "order_proposal" => {
                    let details = req_object(obj, "order_proposal_details")?;
                    let details: ProposalDetails = serde_json::from_value(details.clone())
                        .map_err(|_| ValidationError::FieldType {
                            field: "order_proposal_details",
                            expected: "object with items and pricing",
                        })?;
                    SendBody::OrderProposal(details)
                }
                "pay" => {
                    let details = req_object(obj, "payment_details")?;
                    let details: PaymentDetails = serde_json::from_value(details.clone())
                        .map_err(|_| ValidationError::FieldType {
                            field: "payment_details",
                            expected: "object with proposal_id and method",
                        })?;
                    SendBody::Pay(details)
                }
                other => return Err(ValidationError::UnknownMessageType(other.to_string())),
            };
            ActionRequest::Send { recipient_id, body }
        }
        other => return Err(ValidationError::UnknownAction(other.to_string())),
    };

    Ok(ActionEnvelope { api_token, request })
}

// ---------------------------------------------------------------------------
// Capability matrix

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{role} agents may not {action}")]
pub struct CapabilityDenied {
    pub role: Role,
    pub action: &'static str,
}

/// Role capability matrix. Assistants drive discovery and payment; services
/// respond with text and order proposals; both sides receive. A pure
/// function of the role and the action tag.
pub fn capability_check(role: Role, action: &ActionRequest) -> Result<(), CapabilityDenied> {
    let allowed = match (role, action) {
        (Role::Assistant, ActionRequest::Search { .. }) => true,
        (Role::Assistant, ActionRequest::Send { body: SendBody::Text { .. }, .. }) => true,
        (Role::Assistant, ActionRequest::Send { body: SendBody::Pay(_), .. }) => true,
        (Role::Assistant, ActionRequest::Send { body: SendBody::OrderProposal(_), .. }) => false,
        (Role::Service, ActionRequest::Search { .. }) => false,
        (Role::Service, ActionRequest::Send { body: SendBody::Text { .. }, .. }) => true,
        (Role::Service, ActionRequest::Send { body: SendBody::OrderProposal(_), .. }) => true,
        (Role::Service, ActionRequest::Send { body: SendBody::Pay(_), .. }) => false,
        (_, ActionRequest::Receive) => true,
    };
    if allowed {
        Ok(())
    } else {
        Err(CapabilityDenied {
            role,
            action: action.descriptor_name(),
        })
    }
}

// ---------------------------------------------------------------------------
// Protocol discovery

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDescriptor {
    pub name: String,
    pub schema: Value,
}

/// The descriptor list served by `GET /protocol`. This is the single source
/// of truth for what the action router accepts: adding an action here (and
/// a decode arm) makes it discoverable without touching existing agents.
pub fn protocol_descriptors() -> Vec<ActionDescriptor> {
    fn string_prop() -> Value {
        json!({"type": "string"})
    }

    let mut descriptors = Vec::new();

    descriptors.push(ActionDescriptor {
        name: "search".into(),
        schema: json!({
            "type": "object",
            "properties": {
                "api_token": string_prop(),
                "action": {"const": "search"},
                "query": string_prop(),
                "constraints": {"type": "string", "description": "free-form; `page=N` selects a result page"},
            },
            "required": ["api_token", "action", "query", "constraints"],
        }),
    });

    descriptors.push(ActionDescriptor {
        name: "send_text".into(),
        schema: json!({
            "type": "object",
            "properties": {
                "api_token": string_prop(),
                "action": {"const": "send"},
                "recipient_id": string_prop(),
                "message_type": {"const": "text"},
                "text": string_prop(),
            },
            "required": ["api_token", "action", "recipient_id", "message_type", "text"],
        }),
    });

    descriptors.push(ActionDescriptor {
        name: "send_order_proposal".into(),
        schema: json!({
            "type": "object",
            "properties": {
                "api_token": string_prop(),
                "action": {"const": "send"},
                "recipient_id": string_prop(),
                "message_type": {"const": "order_proposal"},
                "order_proposal_details": {
                    "type": "object",
                    "properties": {
                        "items": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "properties": {
                                    "item_name": string_prop(),
                                    "quantity": {"type": "integer", "minimum": 1},
                                    "unit_price_cents": {"type": "integer", "minimum": 1},
                                },
                                "required": ["item_name", "quantity", "unit_price_cents"],
                            },
                        },
                        "pricing": {
                            "type": "object",
                            "properties": {
                                "total_cents": {"type": "integer"},
                                "currency": string_prop(),
                            },
                            "required": ["total_cents", "currency"],
                        },
                    },
                    "required": ["items", "pricing"],
                },
            },
            "required": ["api_token", "action", "recipient_id", "message_type", "order_proposal_details"],
        }),
    });

    descriptors.push(ActionDescriptor {
        name: "send_payment".into(),
        schema: json!({
            "type": "object",
            "properties": {
                "api_token": string_prop(),
                "action": {"const": "send"},
                "recipient_id": string_prop(),
                "message_type": {"const": "pay"},
                "payment_details": {
                    "type": "object",
                    "properties": {
                        "proposal_id": string_prop(),
                        "method": string_prop(),
                    },
                    "required": ["proposal_id", "method"],
                },
            },
            "required": ["api_token", "action", "recipient_id", "message_type", "payment_details"],
        }),
    });

    descriptors.push(ActionDescriptor {
        name: "receive".into(),
        schema: json!({
            "type": "object",
            "properties": {
                "api_token": string_prop(),
                "action": {"const": "receive"},
            },
            "required": ["api_token", "action"],
        }),
    });

    descriptors
}
