//! HTTP surface: the three market endpoints plus a health probe, served by
//! axum with graceful shutdown that flushes the event log.

use crate::state::{ApiError, MarketState};
use agora_core::protocol::{protocol_descriptors, ErrorBody, RegisterRequest};
use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use std::net::SocketAddr;
use std::sync::Arc;
use tokio::net::TcpListener;

fn error_response(status: StatusCode, message: String) -> Response {
    (status, Json(ErrorBody { error: message })).into_response()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        error_response(status, self.to_string())
    }
}

async fn register_handler(State(state): State<Arc<MarketState>>, body: Bytes) -> Response {
    let request: RegisterRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => {
            return error_response(StatusCode::BAD_REQUEST, format!("malformed register request: {e}"))
        }
    };
    match state.register(&request) {
        Ok(response) => Json(response).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn protocol_handler() -> Response {
    Json(protocol_descriptors()).into_response()
}

async fn action_handler(State(state): State<Arc<MarketState>>, body: Bytes) -> Response {
    match state.route_action(&body) {
        Ok(outcome) => Json(outcome.into_json()).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn health_handler() -> Response {
    Json(serde_json::json!({"status": "ok"})).into_response()
}

pub fn router(state: Arc<MarketState>) -> Router {
    Router::new()
        .route("/register", post(register_handler))
        .route("/protocol", get(protocol_handler))
        .route("/action", post(action_handler))
        .route("/health", get(health_handler))
        .with_state(state)
}

/// A running market server bound to a local address.
pub struct ServerHandle {
    pub addr: SocketAddr,
    state: Arc<MarketState>,
    shutdown_tx: tokio::sync::watch::Sender<bool>,
    join: tokio::task::JoinHandle<()>,
}

impl ServerHandle {
    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn state(&self) -> &Arc<MarketState> {
        &self.state
    }

    /// Stop accepting requests, wait for in-flight ones, flush the log.
    pub async fn shutdown(self) {
        let _ = self.shutdown_tx.send(true);
        let _ = self.join.await;
        self.state.event_log().flush();
    }
}

/// Bind and serve the market on 127.0.0.1 at the configured port (0 picks
/// an ephemeral port, reported through the returned handle).
pub async fn spawn(state: Arc<MarketState>) -> std::io::Result<ServerHandle> {
    let listener = TcpListener::bind(("127.0.0.1", state.config().port)).await?;
    let addr = listener.local_addr()?;
    let (shutdown_tx, mut shutdown_rx) = tokio::sync::watch::channel(false);
    let app = router(Arc::clone(&state));
    let join = tokio::spawn(async move {
        let result = axum::serve(listener, app)
            .with_graceful_shutdown(async move {
                let _ = shutdown_rx.changed().await;
            })
            .await;
        if let Err(e) = result {
            tracing::error!("market server exited with error: {e}");
        }
    });
    tracing::info!("market server listening on {addr}");
    Ok(ServerHandle {
        addr,
        state,
        shutdown_tx,
        join,
    })
}
