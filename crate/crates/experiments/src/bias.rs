//! Bias studies over identical businesses: position trials permute a
//! 3-clone consideration list under a counterbalanced Latin-square
//! schedule; proposal trials sequence response-delay ranks. Each trial runs
//! against its own fresh market so counterbalancing is exact.

use crate::report::{summarize, ConditionReport, ExperimentReport};
use crate::StudyError;
use agora_agents::scripted::{run_scripted_assistant, Discovery, ScriptedConfig, Selector};
use agora_agents::service::{spawn_service_agent, ProposalSequencer, ServiceBehavior};
use agora_core::dataset::Dataset;
use agora_core::search::SearchConfig;
use agora_datagen::bias::{make_bias_variant, BiasKind};
use agora_server::{spawn, MarketState, ServerConfig};
use serde_json::json;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasSelectorKind {
    /// Uniform choice among fitting proposals: the calibration policy that
    /// must show no position preference.
    UniformRandom,
    /// Satisficing policy that pays the first fitting proposal to arrive.
    FirstAccepter,
}

impl std::str::FromStr for BiasSelectorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().replace('_', "-").as_str() {
            "uniform-random" | "uniform" => Ok(BiasSelectorKind::UniformRandom),
            "first-accepter" | "first-proposal" => Ok(BiasSelectorKind::FirstAccepter),
            other => Err(format!("unknown bias policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BiasStudyConfig {
    pub kind: BiasKind,
    /// Customer whose group becomes the clone triple (default: first).
    pub customer_id: Option<String>,
    pub trials: usize,
    pub selector: BiasSelectorKind,
    pub base_seed: u64,
}

impl Default for BiasStudyConfig {
    fn default() -> Self {
        BiasStudyConfig {
            kind: BiasKind::Position,
            customer_id: None,
            trials: 300,
            selector: BiasSelectorKind::UniformRandom,
            base_seed: 1,
        }
    }
}

pub async fn run_bias_study(
    dataset: &Dataset,
    config: &BiasStudyConfig,
) -> Result<ExperimentReport, StudyError> {
    let customer_id = config
        .customer_id
        .clone()
        .unwrap_or_else(|| dataset.customers[0].id.clone());
    let (variant, spec) = make_bias_variant(dataset, config.kind, &customer_id)?;
    let need = variant
        .customer(&customer_id)
        .expect("bias variant keeps the customer")
        .clone();
    let k = spec.business_ids.len();
    let names: Vec<String> = spec
        .business_ids
        .iter()
        .map(|id| variant.business(id).unwrap().name.clone())
        .collect();
    let variant = Arc::new(variant);

    // rank (1-based) -> selections; business -> rank -> occupancy count.
    let mut selections: BTreeMap<usize, usize> = (1..=k).map(|r| (r, 0)).collect();
    let mut occupancy: BTreeMap<(String, usize), usize> = BTreeMap::new();
    let mut abstentions = 0usize;
    let mut flagged = Vec::new();

    for trial in 0..config.trials {
        let outcome = run_bias_trial(&variant, &spec.business_ids, &names, &need, config, trial).await?;
        for (business, rank) in &outcome.assignment {
            *occupancy.entry((business.clone(), *rank)).or_insert(0) += 1;
        }
        match outcome.selected_rank {
            Some(rank) => *selections.entry(rank).or_insert(0) += 1,
            None => abstentions += 1,
        }
        if outcome.flagged {
            flagged.push(format!("trial{trial}"));
        }
    }

    let mut report = ExperimentReport::new(
        match config.kind {
            BiasKind::Position => "bias_position",
            BiasKind::Proposal => "bias_proposal",
        },
        config.trials,
        vec![config.base_seed],
    );
    report.flagged_runs = flagged;
    let completed = config.trials - abstentions;
    for (rank, count) in &selections {
        let rate = if completed == 0 { 0.0 } else { *count as f64 / completed as f64 };
        report.conditions.push(ConditionReport {
            condition: format!("rank_{rank}"),
            metrics: BTreeMap::from([
                ("selections".to_string(), summarize(&[*count as f64])),
                ("selection_rate".to_string(), summarize(&[rate])),
            ]),
        });
    }
    report.extra = json!({
        "customer_id": customer_id,
        "business_ids": spec.business_ids,
        "trials": config.trials,
        "abstentions": abstentions,
        "occupancy": occupancy
            .iter()
            .map(|((business, rank), count)| json!({
                "business": business,
                "rank": rank,
                "count": count,
            }))
            .collect::<Vec<_>>(),
    });
    Ok(report)
}

struct TrialOutcome {
    /// (business id, rank) pairs in effect this trial. Rank means list
    /// position for position trials and delay rank for proposal trials.
    assignment: Vec<(String, usize)>,
    selected_rank: Option<usize>,
    flagged: bool,
}

async fn run_bias_trial(
    variant: &Arc<Dataset>,
    business_ids: &[String],
    names: &[String],
    need: &agora_core::domain::CustomerNeed,
    config: &BiasStudyConfig,
    trial: usize,
) -> Result<TrialOutcome, StudyError> {
    let k = business_ids.len();
    let server = spawn(MarketState::new(
        Arc::clone(variant),
        ServerConfig {
            search: SearchConfig::perfect(),
            action_budget: 1_000,
            ..Default::default()
        },
    ))
    .await
    .map_err(crate::runner::RunnerError::Serve)?;
    let http = reqwest::Client::new();

    // Position trials rotate the presented order; proposal trials rotate
    // the delay ranks. Either way each business holds each rank exactly
    // trials/k times when trials is a multiple of k.
    let rotation = trial % k;
    let mut assignment: Vec<(String, usize)> = Vec::with_capacity(k);
    let mut presented: Vec<String> = Vec::with_capacity(k);
    let sequencer = ProposalSequencer::new();
    let mut services = Vec::with_capacity(k);

    // Only three services per trial, so they can poll briskly.
    let trial_poll = std::time::Duration::from_millis(4);
    match config.kind {
        BiasKind::Position => {
            for position in 0..k {
                let business_index = (position + rotation) % k;
                presented.push(names[business_index].clone());
                assignment.push((business_ids[business_index].clone(), position + 1));
            }
            for id in business_ids {
                let business = variant.business(id).unwrap().clone();
                let behavior = ServiceBehavior {
                    poll_interval: trial_poll,
                    ..Default::default()
                };
                services.push(
                    spawn_service_agent(http.clone(), &server.base_url(), business, behavior)
                        .await
                        .map_err(crate::runner::RunnerError::Service)?,
                );
            }
        }
        BiasKind::Proposal => {
            presented = names.to_vec();
            for (i, id) in business_ids.iter().enumerate() {
                let rank = (i + rotation) % k + 1;
                assignment.push((id.clone(), rank));
                let business = variant.business(id).unwrap().clone();
                let behavior = ServiceBehavior {
                    poll_interval: trial_poll,
                    proposal_gate: Some((rank as u8, Arc::clone(&sequencer))),
                    ..Default::default()
                };
                services.push(
                    spawn_service_agent(http.clone(), &server.base_url(), business, behavior)
                        .await
                        .map_err(crate::runner::RunnerError::Service)?,
                );
            }
        }
    }

    let mut scripted = ScriptedConfig::new(need.id.clone());
    scripted.discovery = Discovery::Provided(presented.clone());
    scripted.selector = match config.selector {
        BiasSelectorKind::UniformRandom => Selector::UniformRandom {
            seed: config
                .base_seed
                .wrapping_mul(1_000_003)
                .wrapping_add(trial as u64),
        },
        BiasSelectorKind::FirstAccepter => Selector::FirstProposal,
    };
    let episode = run_scripted_assistant(http.clone(), &server.base_url(), need, &scripted).await;

    let selected_rank = episode.transacted_business.as_ref().map(|paid_name| {
        let business_id = variant.business_by_name(paid_name).map(|b| b.id.clone());
        match config.kind {
            // Rank = 1-based position in the presented list.
            BiasKind::Position => presented.iter().position(|n| n == paid_name).unwrap() + 1,
            // Rank = the paid business's delay rank this trial.
            BiasKind::Proposal => {
                let id = business_id.expect("paid business exists");
                assignment.iter().find(|(b, _)| *b == id).unwrap().1
            }
        }
    });

    for service in services {
        service.stop().await.map_err(crate::runner::RunnerError::Service)?;
    }
    server.shutdown().await;

    Ok(TrialOutcome {
        assignment,
        selected_rank,
        flagged: episode.flagged,
    })
}
