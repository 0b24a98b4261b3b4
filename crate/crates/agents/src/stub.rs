//! A canned chat-completions endpoint for exercising the LLM adapter
//! without a live model: it replays a scripted sequence of tool calls,
//! resolving runtime identifiers (like proposal ids) from the transcript
//! the same way a real model would read them.

use axum::extract::State;
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};
use std::collections::VecDeque;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

/// One scripted model turn.
#[derive(Debug, Clone)]
pub enum StubStep {
    /// A well-formed tool call with literal arguments.
    ToolCall { name: String, arguments: Value },
    /// Keep issuing `receive` calls until the transcript shows a non-empty
    /// inbox, then move on to the next step.
    ReceiveUntilInbox,
    /// Pay the most recent proposal visible in the conversation, addressed
    /// to its proposer (both recovered from the request transcript).
    PayLatestProposal,
    /// A tool call with unparseable arguments, to drive the fallback path.
    Malformed,
    /// A plain text turn (ends the adapter's episode).
    Text { content: String },
}

struct StubState {
    steps: Mutex<VecDeque<StubStep>>,
    requests_served: Mutex<u32>,
}

pub struct StubHandle {
    pub addr: SocketAddr,
    state: Arc<StubState>,
    shutdown_tx: tokio::sync::watch::Sender<bool>,
    join: tokio::task::JoinHandle<()>,
}

impl StubHandle {
    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn requests_served(&self) -> u32 {
        *self.state.requests_served.lock().unwrap()
    }

    pub async fn shutdown(self) {
        let _ = self.shutdown_tx.send(true);
        let _ = self.join.await;
    }
}

/// Find the latest proposal mentioned anywhere in the conversation the
/// adapter sent us: tool results carry receive responses whose envelopes
/// embed full proposals.
fn latest_proposal(messages: &[Value]) -> Option<(String, String)> {
    for message in messages.iter().rev() {
        let Some(content) = message["content"].as_str() else {
            continue;
        };
        let Ok(value) = serde_json::from_str::<Value>(content) else {
            continue;
        };
        if let Some(found) = find_proposal(&value) {
            return Some(found);
        }
    }
    None
}

fn find_proposal(value: &Value) -> Option<(String, String)> {
    match value {
        Value::Object(map) => {
            if let (Some(id), Some(from)) = (
                map.get("proposal_id").and_then(Value::as_str),
                map.get("from_agent").and_then(Value::as_str),
            ) {
                return Some((id.to_string(), from.to_string()));
            }
            // Walk in reverse so the newest entries in arrays/maps win.
            map.values().rev().find_map(find_proposal)
        }
        Value::Array(items) => items.iter().rev().find_map(find_proposal),
        _ => None,
    }
}

/// True when any tool result in the conversation carried a non-empty
/// `messages` list (i.e. a receive returned mail).
fn inbox_seen(messages: &[Value]) -> bool {
    messages.iter().any(|message| {
        message["content"]
            .as_str()
            .and_then(|content| serde_json::from_str::<Value>(content).ok())
            .and_then(|value| value["messages"].as_array().map(|m| !m.is_empty()))
            .unwrap_or(false)
    })
}

fn completion_with_tool_call(name: &str, arguments: String) -> Value {
    json!({
        "choices": [{
            "message": {
                "role": "assistant",
                "content": null,
                "tool_calls": [{
                    "id": "call_1",
                    "type": "function",
                    "function": {"name": name, "arguments": arguments},
                }],
            },
        }],
    })
}

async fn completions_handler(
    State(state): State<Arc<StubState>>,
    Json(body): Json<Value>,
) -> Json<Value> {
    *state.requests_served.lock().unwrap() += 1;
    let step = {
        let mut steps = state.steps.lock().unwrap();
        // Gate steps consume themselves once their condition holds.
        while matches!(steps.front(), Some(StubStep::ReceiveUntilInbox)) {
            let transcript = body["messages"].as_array().cloned().unwrap_or_default();
            if inbox_seen(&transcript) {
                steps.pop_front();
            } else {
                break;
            }
        }
        match steps.front() {
            Some(StubStep::ReceiveUntilInbox) => Some(StubStep::ToolCall {
                name: "receive".into(),
                arguments: serde_json::json!({}),
            }),
            _ => steps.pop_front(),
        }
    };
    let response = match step {
        None | Some(StubStep::Text { .. }) => {
            let content = match step {
                Some(StubStep::Text { content }) => content,
                _ => "Episode complete.".to_string(),
            };
            json!({
                "choices": [{"message": {"role": "assistant", "content": content}}],
            })
        }
        Some(StubStep::ToolCall { name, arguments }) => {
            completion_with_tool_call(&name, arguments.to_string())
        }
        Some(StubStep::ReceiveUntilInbox) => unreachable!("gate resolved above"),
        Some(StubStep::Malformed) => {
            completion_with_tool_call("send_payment", "{not valid json".to_string())
        }
        Some(StubStep::PayLatestProposal) => {
            let messages = body["messages"].as_array().cloned().unwrap_or_default();
            match latest_proposal(&messages) {
                Some((proposal_id, payee)) => completion_with_tool_call(
                    "send_payment",
                    json!({
                        "recipient_id": payee,
                        "payment_details": {"proposal_id": proposal_id, "method": "card"},
                    })
                    .to_string(),
                ),
                // Nothing to pay yet; poll again like a careful model would.
                None => completion_with_tool_call("receive", "{}".to_string()),
            }
        }
    };
    Json(response)
}

/// Serve the scripted endpoint on an ephemeral local port.
pub async fn spawn_stub(steps: Vec<StubStep>) -> std::io::Result<StubHandle> {
    let state = Arc::new(StubState {
        steps: Mutex::new(steps.into()),
        requests_served: Mutex::new(0),
    });
    let app = Router::new()
        .route("/chat/completions", post(completions_handler))
        .with_state(Arc::clone(&state));
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", 0)).await?;
    let addr = listener.local_addr()?;
    let (shutdown_tx, mut shutdown_rx) = tokio::sync::watch::channel(false);
    let join = tokio::spawn(async move {
        let _ = axum::serve(listener, app)
            .with_graceful_shutdown(async move {
                let _ = shutdown_rx.changed().await;
            })
            .await;
    });
    Ok(StubHandle {
        addr,
        state,
        shutdown_tx,
        join,
    })
}
