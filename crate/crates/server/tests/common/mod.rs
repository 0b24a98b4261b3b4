//! Shared helpers for server integration tests.

use agora_core::dataset::Dataset;
use agora_datagen::config::{Domain, GenerationConfig, Scale};
use agora_server::{spawn, MarketState, ServerConfig, ServerHandle};
use serde_json::Value;
use std::sync::Arc;

/// A small 3-customer / 9-business dataset for fast end-to-end tests.
pub fn tiny_dataset() -> Dataset {
    let mut config = GenerationConfig::preset(Domain::Restaurants, Scale::Small, 5);
    config.n_customers = 3;
    config.universe_size = 40;
    config.desirable_count = 24;
    agora_datagen::generate(&config).unwrap()
}

pub async fn spawn_server(dataset: Dataset, config: ServerConfig) -> ServerHandle {
    let state = MarketState::new(Arc::new(dataset), config);
    spawn(state).await.expect("bind local server")
}

pub async fn register(client: &reqwest::Client, base: &str, name: &str, description: &str) -> String {
    let response = client
        .post(format!("{base}/register"))
        .json(&serde_json::json!({
            "agent_name": name,
            "service_description": description,
        }))
        .send()
        .await
        .unwrap();
    assert!(
        response.status().is_success(),
        "register {name} failed: {}",
        response.text().await.unwrap()
    );
    let body: Value = response.json().await.unwrap();
    body["api_token"].as_str().unwrap().to_string()
}

pub async fn action(client: &reqwest::Client, base: &str, body: Value) -> (u16, Value) {
    let response = client
        .post(format!("{base}/action"))
        .json(&body)
        .send()
        .await
        .unwrap();
    let status = response.status().as_u16();
    let value: Value = response.json().await.unwrap();
    (status, value)
}
