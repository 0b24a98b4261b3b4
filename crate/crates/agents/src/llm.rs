//! Provider-agnostic LLM agent adapter. The model talks to any
//! chat-completions-style endpoint; its tool calls are parsed into validated
//! protocol actions and every exchange is logged to a line-delimited
//! transcript. Tool definitions are built from the market's own
//! `GET /protocol` descriptors.

use crate::client::{AgentError, MarketClient};
use crate::scripted::EpisodeResult;
use agora_core::domain::{BusinessRecord, CustomerNeed};
use agora_core::money::Money;
use agora_core::protocol::{ActionDescriptor, ActionRequest, ErrorBody};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use thiserror::Error;

pub const ASSISTANT_PROMPT_V1: &str = include_str!("../prompts/assistant_v1.txt");
pub const SERVICE_PROMPT_V1: &str = include_str!("../prompts/service_v1.txt");

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("model endpoint unreachable: {0}")]
    Endpoint(String),
    #[error("model endpoint returned status {0}: {1}")]
    EndpointStatus(u16, String),
    #[error("market error: {0}")]
    Market(#[from] AgentError),
    #[error("transcript io error: {0}")]
    Transcript(#[from] std::io::Error),
}

/// Where the model lives. `from_env` reads AGORA_LLM_BASE_URL,
/// AGORA_LLM_MODEL, and AGORA_LLM_API_KEY.
#[derive(Debug, Clone)]
pub struct LlmEndpoint {
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
}

impl LlmEndpoint {
    pub fn from_env() -> Option<Self> {
        let base_url = std::env::var("AGORA_LLM_BASE_URL").ok()?;
        let model = std::env::var("AGORA_LLM_MODEL").ok()?;
        Some(LlmEndpoint {
            base_url,
            model,
            api_key: std::env::var("AGORA_LLM_API_KEY").ok(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LlmAgentConfig {
    pub agent_name: String,
    pub max_steps: u32,
    pub transcript_path: Option<PathBuf>,
}

impl LlmAgentConfig {
    pub fn new(agent_name: impl Into<String>) -> Self {
        LlmAgentConfig {
            agent_name: agent_name.into(),
            max_steps: 40,
            transcript_path: None,
        }
    }
}

/// Line-delimited JSON log of one episode's model and market exchanges.
pub struct Transcript {
    file: Option<std::fs::File>,
    step: u32,
}

impl Transcript {
    pub fn open(path: &Option<PathBuf>) -> std::io::Result<Self> {
        let file = match path {
            Some(p) => {
                if let Some(parent) = p.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                Some(std::fs::File::create(p)?)
            }
            None => None,
        };
        Ok(Transcript { file, step: 0 })
    }

    pub fn log(&mut self, phase: &str, payload: Value) {
        self.step += 1;
        if let Some(file) = &mut self.file {
            let record = json!({"step": self.step, "phase": phase, "payload": payload});
            let _ = writeln!(file, "{record}");
        }
    }
}

/// Map the market's protocol descriptors onto chat-completions tool
/// definitions. The api_token is stripped: the adapter injects it, the
/// model never sees credentials.
pub fn tools_from_descriptors(descriptors: &[ActionDescriptor]) -> Vec<Value> {
    descriptors
        .iter()
        .map(|d| {
            let mut schema = d.schema.clone();
            if let Some(properties) = schema["properties"].as_object_mut() {
                properties.remove("api_token");
            }
            if let Some(required) = schema["required"].as_array_mut() {
                required.retain(|f| f != "api_token");
            }
            json!({
                "type": "function",
                "function": {
                    "name": d.name,
                    "description": format!("Market action {}", d.name),
                    "parameters": schema,
                },
            })
        })
        .collect()
}

/// Reconstruct an action request from a tool call by re-adding the consts
/// the descriptor pinned (action, message_type) and decoding through the
/// protocol codec, so the model's output is validated exactly like any
/// other client's bytes.
pub fn action_from_tool_call(
    descriptors: &[ActionDescriptor],
    tool_name: &str,
    arguments: &str,
) -> Result<ActionRequest, String> {
    let descriptor = descriptors
        .iter()
        .find(|d| d.name == tool_name)
        .ok_or_else(|| format!("unknown tool {tool_name:?}"))?;
    let mut body: Value =
        serde_json::from_str(arguments).map_err(|e| format!("tool arguments are not JSON: {e}"))?;
    let obj = body
        .as_object_mut()
        .ok_or_else(|| "tool arguments must be a JSON object".to_string())?;
    if let Some(properties) = descriptor.schema["properties"].as_object() {
        for (field, prop) in properties {
            if let Some(constant) = prop.get("const") {
                obj.insert(field.clone(), constant.clone());
            }
        }
    }
    obj.insert("api_token".into(), Value::String("placeholder".into()));
    let bytes = serde_json::to_vec(&body).expect("json value serializes");
    agora_core::protocol::decode_request(&bytes)
        .map(|envelope| envelope.request)
        .map_err(|e| e.to_string())
}

async fn chat(
    http: &reqwest::Client,
    endpoint: &LlmEndpoint,
    messages: &[Value],
    tools: &[Value],
) -> Result<Value, LlmError> {
    let mut request = http
        .post(format!("{}/chat/completions", endpoint.base_url.trim_end_matches('/')))
        .json(&json!({
            "model": endpoint.model,
            "messages": messages,
            "tools": tools,
        }));
    if let Some(key) = &endpoint.api_key {
        request = request.bearer_auth(key);
    }
    let response = request
        .send()
        .await
        .map_err(|e| LlmError::Endpoint(e.to_string()))?;
    let status = response.status().as_u16();
    let body: Value = response
        .json()
        .await
        .map_err(|e| LlmError::Endpoint(format!("malformed completion body: {e}")))?;
    if status != 200 {
        return Err(LlmError::EndpointStatus(status, body.to_string()));
    }
    Ok(body)
}

fn tool_result(call_id: &str, content: &str) -> Value {
    json!({"role": "tool", "tool_call_id": call_id, "content": content})
}

/// What the model decided on one turn.
#[derive(Debug)]
pub enum ModelTurn {
    /// A validated market action, to be executed by the caller.
    Action { action: ActionRequest, call_id: String },
    /// Plain text: the model considers its episode finished.
    Finished { content: String },
    /// The model produced unusable output twice; the caller should run a
    /// no-op receive and flag the episode.
    Fallback { error: String },
}

/// One adapter step: send the transcript and tool definitions to the model
/// and parse its reply into the next validated action request. Invalid
/// output triggers exactly one reprompt (with the validation error fed
/// back) before giving up with `Fallback`.
pub async fn llm_agent_step(
    http: &reqwest::Client,
    endpoint: &LlmEndpoint,
    descriptors: &[ActionDescriptor],
    tools: &[Value],
    messages: &mut Vec<Value>,
    transcript: &mut Transcript,
) -> Result<ModelTurn, LlmError> {
    for attempt in 0..2 {
        let completion = chat(http, endpoint, messages, tools).await?;
        let message = completion["choices"][0]["message"].clone();
        transcript.log("model", message.clone());

        let Some(tool_call) = message["tool_calls"].get(0).cloned() else {
            return Ok(ModelTurn::Finished {
                content: message["content"].as_str().unwrap_or_default().to_string(),
            });
        };
        let tool_name = tool_call["function"]["name"].as_str().unwrap_or_default();
        let arguments = tool_call["function"]["arguments"].as_str().unwrap_or_default();
        let call_id = tool_call["id"].as_str().unwrap_or("call_0").to_string();
        messages.push(message.clone());

        match action_from_tool_call(descriptors, tool_name, arguments) {
            Ok(action) => return Ok(ModelTurn::Action { action, call_id }),
            Err(error) => {
                transcript.log("invalid_tool_call", json!({"error": error, "attempt": attempt}));
                messages.push(tool_result(&call_id, &json!({ "error": error }).to_string()));
                if attempt == 1 {
                    return Ok(ModelTurn::Fallback { error });
                }
            }
        }
    }
    unreachable!("loop returns within two attempts")
}

fn render_assistant_prompt(need: &CustomerNeed) -> String {
    let items: Vec<String> = need.desired_item_names().map(String::from).collect();
    let amenities: Vec<String> = need.required_amenities.iter().cloned().collect();
    // The briefing quotes the desired items' combined average price; with
    // the default calibration the order's value is twice that figure.
    let avg_total = Money::from_cents(need.value_cents.cents() / 2);
    ASSISTANT_PROMPT_V1
        .replace("{{request}}", &need.nl_request)
        .replace("{{items}}", &items.join("; "))
        .replace("{{amenities}}", &amenities.join("; "))
        .replace("{{avg_total}}", &avg_total.to_string())
        .replace("{{value}}", &need.value_cents.to_string())
}

fn render_service_prompt(business: &BusinessRecord) -> String {
    SERVICE_PROMPT_V1.replace(
        "{{business_json}}",
        &serde_json::to_string_pretty(business).expect("business serializes"),
    )
}

/// Drive one consumer episode with an LLM assistant. Malformed model output
/// triggers one reprompt then a no-op receive with the episode flagged. An
/// unreachable endpoint aborts the episode with an error (never silently
/// scored).
pub async fn run_llm_assistant(
    http: reqwest::Client,
    base_url: &str,
    endpoint: &LlmEndpoint,
    need: &CustomerNeed,
    config: &LlmAgentConfig,
) -> Result<EpisodeResult, LlmError> {
    let mut transcript = Transcript::open(&config.transcript_path)?;
    let client = MarketClient::register(http.clone(), base_url, &config.agent_name, "").await?;
    let descriptors = client.fetch_protocol().await?;
    let tools = tools_from_descriptors(&descriptors);

    let mut result = EpisodeResult {
        customer_id: need.id.clone(),
        agent_name: config.agent_name.clone(),
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
    };

    let mut messages = vec![json!({"role": "system", "content": render_assistant_prompt(need)})];
    transcript.log("system", messages[0].clone());

    // Proposals seen so far, keyed by id: needed to score the payment.
    let mut proposals_seen: std::collections::HashMap<String, agora_core::domain::OrderProposal> =
        std::collections::HashMap::new();

    for _ in 0..config.max_steps {
        let turn = llm_agent_step(&http, endpoint, &descriptors, &tools, &mut messages, &mut transcript)
            .await?;
        match turn {
            ModelTurn::Finished { content } => {
                result.trace.push(format!("model finished: {content}"));
                break;
            }
            ModelTurn::Fallback { error } => {
                result.flagged = true;
                result
                    .trace
                    .push(format!("malformed model output twice ({error}); fell back to receive"));
                transcript.log("fallback", json!({"action": "receive"}));
                let envelopes = client.receive().await?;
                result.messages_received += envelopes.len() as u32;
            }
            ModelTurn::Action { action, call_id } => {
                execute_assistant_action(
                    &client,
                    action,
                    &call_id,
                    &mut messages,
                    &mut transcript,
                    &mut result,
                    &mut proposals_seen,
                    need,
                )
                .await?;
                if result.transaction_id.is_some() {
                    break;
                }
            }
        }
    }

    Ok(result)
}

#[allow(clippy::too_many_arguments)]
async fn execute_assistant_action(
    client: &MarketClient,
    action: ActionRequest,
    call_id: &str,
    messages: &mut Vec<Value>,
    transcript: &mut Transcript,
    result: &mut EpisodeResult,
    proposals_seen: &mut std::collections::HashMap<String, agora_core::domain::OrderProposal>,
    need: &CustomerNeed,
) -> Result<(), LlmError> {
    transcript.log("action", json!({"kind": action.descriptor_name()}));
    let mut pay_details = None;
    if let ActionRequest::Send { recipient_id, body } = &action {
        match body {
            agora_core::protocol::SendBody::Text { .. } => {
                result.messages_sent += 1;
                if !result.contacted.contains(recipient_id) {
                    result.contacted.push(recipient_id.clone());
                }
            }
            agora_core::protocol::SendBody::Pay(details) => {
                pay_details = Some((
                    recipient_id.clone(),
                    proposals_seen.get(&details.proposal_id).cloned(),
                ));
            }
            _ => {}
        }
    }

    let (status, bytes) = client.action_raw(action.clone()).await?;
    let body_text = String::from_utf8_lossy(&bytes).to_string();
    transcript.log("action_result", json!({"status": status, "body": body_text}));
    messages.push(tool_result(call_id, &body_text));

    if status == 200 {
        match &action {
            ActionRequest::Search { .. } => {
                if let Ok(response) =
                    serde_json::from_slice::<agora_core::protocol::SearchResponse>(&bytes)
                {
                    for r in response.results {
                        if !result.consideration.contains(&r.agent_name) {
                            result.consideration.push(r.agent_name);
                        }
                    }
                }
            }
            ActionRequest::Receive => {
                if let Ok(response) =
                    serde_json::from_slice::<agora_core::protocol::MessagesResponse>(&bytes)
                {
                    result.messages_received += response.messages.len() as u32;
                    if response.messages.is_empty() {
                        // Back off a little between empty polls.
                        tokio::time::sleep(std::time::Duration::from_millis(10)).await;
                    }
                    for envelope in response.messages {
                        if let agora_core::protocol::MessagePayload::OrderProposal { proposal } =
                            envelope.payload
                        {
                            proposals_seen.insert(proposal.proposal_id.clone(), proposal);
                        }
                    }
                }
            }
            ActionRequest::Send { .. } => {
                if let Some((payee, proposal)) = pay_details {
                    if let Ok(response) = serde_json::from_slice::<
                        agora_core::protocol::TransactionIdResponse,
                    >(&bytes)
                    {
                        result.transaction_id = Some(response.transaction_id);
                        result.transacted_business = Some(payee);
                        if let Some(proposal) = proposal {
                            // Utility is recomputed against ground truth by
                            // the audit; here we record value - price, which
                            // assumes fit and is corrected downstream if not.
                            result.utility = need.value_cents - proposal.total_price_cents;
                            result.proposal = Some(proposal);
                        }
                    }
                }
            }
        }
    } else if let Ok(error) = serde_json::from_slice::<ErrorBody>(&bytes) {
        // Error feedback loops back through the transcript for the next step.
        result.trace.push(format!("market error {status}: {}", error.error));
    }
    Ok(())
}

/// What an LLM-driven service did during its run.
#[derive(Debug, Default)]
pub struct LlmServiceStats {
    pub steps: u32,
    pub replies_sent: u32,
    pub proposals_sent: u32,
    pub flagged: bool,
}

/// Drive a service agent with an LLM: the model polls its mailbox, answers
/// inquiries from its business record, and sends proposals, until the
/// shutdown signal flips or `max_steps` model turns have run.
pub async fn run_llm_service(
    http: reqwest::Client,
    base_url: &str,
    endpoint: &LlmEndpoint,
    business: &BusinessRecord,
    config: &LlmAgentConfig,
    mut shutdown: tokio::sync::watch::Receiver<bool>,
) -> Result<LlmServiceStats, LlmError> {
    let mut transcript = Transcript::open(&config.transcript_path)?;
    let client = MarketClient::register(
        http.clone(),
        base_url,
        &business.name,
        &business.description,
    )
    .await?;
    let descriptors = client.fetch_protocol().await?;
    let tools = tools_from_descriptors(&descriptors);

    let mut stats = LlmServiceStats::default();
    let mut messages = vec![json!({"role": "system", "content": render_service_prompt(business)})];
    transcript.log("system", messages[0].clone());

    for _ in 0..config.max_steps {
        if *shutdown.borrow_and_update() {
            break;
        }
        let turn = llm_agent_step(&http, endpoint, &descriptors, &tools, &mut messages, &mut transcript)
            .await?;
        stats.steps += 1;
        match turn {
            ModelTurn::Finished { .. } => break,
            ModelTurn::Fallback { error } => {
                stats.flagged = true;
                transcript.log("fallback", json!({"action": "receive", "error": error}));
                let _ = client.receive().await?;
            }
            ModelTurn::Action { action, call_id } => {
                if let ActionRequest::Send { body, .. } = &action {
                    match body {
                        agora_core::protocol::SendBody::Text { .. } => stats.replies_sent += 1,
                        agora_core::protocol::SendBody::OrderProposal(_) => {
                            stats.proposals_sent += 1
                        }
                        _ => {}
                    }
                }
                let polling = matches!(action, ActionRequest::Receive);
                transcript.log("action", json!({"kind": action.descriptor_name()}));
                let (status, bytes) = client.action_raw(action).await?;
                let body_text = String::from_utf8_lossy(&bytes).to_string();
                transcript.log("action_result", json!({"status": status, "body": body_text}));
                messages.push(tool_result(&call_id, &body_text));
                if polling && body_text.contains("\"messages\":[]") {
                    // Back off a little between empty polls.
                    tokio::time::sleep(std::time::Duration::from_millis(10)).await;
                }
            }
        }
    }
    Ok(stats)
}
