//! Market participants for the agora environment: the typed HTTP client,
//! offline baseline selectors, the scripted protocol-driving assistant,
//! rule-based service agents, and a provider-agnostic LLM adapter with a
//! canned stub endpoint for conformance testing.

pub mod baselines;
pub mod client;
pub mod dialogue;
pub mod llm;
pub mod scripted;
pub mod service;
pub mod stub;

pub use baselines::{analytic_expected_welfare, baseline_select, BaselineChoice, BaselinePolicy};
pub use client::{AgentError, MarketClient};
pub use llm::{llm_agent_step, run_llm_assistant, run_llm_service, LlmAgentConfig, LlmEndpoint};
pub use scripted::{run_scripted_assistant, Discovery, EpisodeResult, ScriptedConfig, Selector};
pub use service::{spawn_service_agent, ProposalSequencer, ServiceBehavior, ServiceHandle};
