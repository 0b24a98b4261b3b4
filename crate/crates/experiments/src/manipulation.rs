//! Competitive manipulation study: one target business per customer group
//! gets its description rewritten per strategy; competitors stay honest.
//! Reports payments captured by the manipulated businesses per arm.

use crate::report::{summarize, ConditionReport, ExperimentReport};
use crate::runner::{run_market_episodes, MarketRunConfig};
use crate::StudyError;
use agora_agents::scripted::ScriptedConfig;
use agora_core::dataset::Dataset;
use agora_core::search::SearchConfig;
use agora_datagen::manipulate::{inject_manipulation, ManipulationStrategy};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct ManipulationStudyConfig {
    pub strategies: Vec<ManipulationStrategy>,
    pub runs: usize,
    pub base_seed: u64,
    pub parallelism: usize,
    /// Defaults to perfect search: its fit/price ranking ignores
    /// descriptions, so the scripted null check isolates the description
    /// channel exactly.
    pub search: SearchConfig,
    pub event_log_dir: Option<PathBuf>,
}

impl Default for ManipulationStudyConfig {
    fn default() -> Self {
        ManipulationStudyConfig {
            strategies: ManipulationStrategy::ALL.to_vec(),
            runs: 5,
            base_seed: 1,
            parallelism: 8,
            search: SearchConfig::perfect(),
            event_log_dir: None,
        }
    }
}

/// Deterministic target rule: per customer group, the full-fit business
/// that is not the optimum (lowest id when several); the optimum itself if
/// it is the group's only full fit. These are the businesses with a real
/// shot at stealing the payment.
pub fn manipulation_targets(dataset: &Dataset) -> BTreeMap<String, String> {
    dataset
        .ground_truth
        .iter()
        .map(|(customer_id, entry)| {
            let mut group_fits: Vec<&String> = entry
                .group
                .iter()
                .filter(|id| entry.full_fit.contains(*id) && **id != entry.optimal_business)
                .collect();
            group_fits.sort();
            let target = group_fits
                .first()
                .map(|id| (*id).clone())
                .unwrap_or_else(|| entry.optimal_business.clone());
            (customer_id.clone(), target)
        })
        .collect()
}

pub async fn run_manipulation_study(
    dataset: &Dataset,
    config: &ManipulationStudyConfig,
) -> Result<ExperimentReport, StudyError> {
    let seeds: Vec<u64> = (0..config.runs as u64).map(|r| config.base_seed + r).collect();
    let mut report = ExperimentReport::new("manipulation", config.runs, seeds);
    let targets = manipulation_targets(dataset);
    let group_count = targets.len() as f64;

    let mut per_arm_payments: BTreeMap<String, Vec<BTreeMap<String, u32>>> = BTreeMap::new();

    for strategy in &config.strategies {
        // Build the arm's dataset: every group's target manipulated.
        let mut arm_dataset = dataset.clone();
        for target in targets.values() {
            arm_dataset = inject_manipulation(&arm_dataset, *strategy, target)?;
        }

        let mut welfare = Vec::new();
        let mut captured_counts = Vec::new();
        let mut captured_revenue = Vec::new();

        for run_index in 0..config.runs {
            let event_log_path = config
                .event_log_dir
                .as_ref()
                .map(|dir| dir.join(format!("{strategy}-run{run_index}.ldjson")));
            let run = run_market_episodes(
                &arm_dataset,
                MarketRunConfig {
                    search: config.search.clone(),
                    parallelism: config.parallelism,
                    event_log_path,
                    ..Default::default()
                },
                |need| ScriptedConfig::new(need.id.clone()),
            )
            .await?;
            if run.flagged() {
                report.flagged_runs.push(format!("{strategy}/run{run_index}"));
                continue;
            }
            run.audit(&arm_dataset)?;

            // Payments captured by each group's manipulated business.
            let mut captured: BTreeMap<String, u32> = BTreeMap::new();
            let mut revenue = 0i64;
            for episode in &run.episodes {
                let Some(payee_name) = &episode.transacted_business else {
                    continue;
                };
                let Some(payee) = arm_dataset.business_by_name(payee_name) else {
                    continue;
                };
                let target = &targets[&episode.customer_id];
                if payee.id == *target {
                    *captured.entry(episode.customer_id.clone()).or_insert(0) += 1;
                    revenue += episode
                        .proposal
                        .as_ref()
                        .map(|p| p.total_price_cents.cents())
                        .unwrap_or(0);
                }
            }
            welfare.push(run.total_welfare().cents() as f64);
            captured_counts.push(captured.values().map(|c| *c as f64).sum::<f64>());
            captured_revenue.push(revenue as f64);
            per_arm_payments
                .entry(strategy.name().to_string())
                .or_default()
                .push(captured);
        }

        let mean_per_group: Vec<f64> = captured_counts.iter().map(|c| c / group_count).collect();
        report.conditions.push(ConditionReport {
            condition: strategy.name().to_string(),
            metrics: BTreeMap::from([
                ("welfare_cents".to_string(), summarize(&welfare)),
                ("manipulated_payments".to_string(), summarize(&captured_counts)),
                ("manipulated_payments_per_group".to_string(), summarize(&mean_per_group)),
                ("manipulated_revenue_cents".to_string(), summarize(&captured_revenue)),
            ]),
        });
    }

    report.extra = json!({
        "targets": targets,
        "group_size": dataset
            .ground_truth
            .values()
            .next()
            .map(|e| e.group.len())
            .unwrap_or(0),
        "per_run_captures": per_arm_payments,
    });
    Ok(report)
}
