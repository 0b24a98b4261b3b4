//! Consideration-set-size study: sweep the number of lexical search results
//! available to the assistant and record welfare and outreach.

use crate::report::{summarize, ConditionReport, ExperimentReport};
use crate::runner::{run_market_episodes, MarketRunConfig};
use crate::StudyError;
use agora_agents::scripted::{Discovery, ScriptedConfig};
use agora_core::dataset::Dataset;
use agora_core::search::SearchConfig;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct ConsiderationStudyConfig {
    /// Consideration-set sizes to sweep.
    pub result_limits: Vec<usize>,
    pub runs: usize,
    pub base_seed: u64,
    pub parallelism: usize,
    pub event_log_dir: Option<PathBuf>,
}

impl Default for ConsiderationStudyConfig {
    fn default() -> Self {
        ConsiderationStudyConfig {
            result_limits: vec![3, 10, 25, 50, 100],
            runs: 5,
            base_seed: 1,
            parallelism: 8,
            event_log_dir: None,
        }
    }
}

pub async fn run_consideration_study(
    dataset: &Dataset,
    config: &ConsiderationStudyConfig,
) -> Result<ExperimentReport, StudyError> {
    let seeds: Vec<u64> = (0..config.runs as u64).map(|r| config.base_seed + r).collect();
    let mut report = ExperimentReport::new("consideration", config.runs, seeds);

    for &limit in &config.result_limits {
        let mut welfare = Vec::new();
        let mut messages = Vec::new();
        let mut contacted = Vec::new();

        for run_index in 0..config.runs {
            let mut search = SearchConfig::lexical();
            search.result_limit = Some(limit);
            let event_log_path = config
                .event_log_dir
                .as_ref()
                .map(|dir| dir.join(format!("limit{limit}-run{run_index}.ldjson")));
            let run = run_market_episodes(
                dataset,
                MarketRunConfig {
                    search,
                    parallelism: config.parallelism,
                    event_log_path,
                    ..Default::default()
                },
                |need| {
                    let mut c = ScriptedConfig::new(need.id.clone());
                    c.discovery = Discovery::Search { fetch_limit: Some(limit) };
                    c
                },
            )
            .await?;
            if run.flagged() {
                report.flagged_runs.push(format!("limit{limit}/run{run_index}"));
                continue;
            }
            run.audit(dataset)?;
            welfare.push(run.total_welfare().cents() as f64);
            messages.push(run.messages_per_customer());
            contacted.push(run.businesses_contacted_per_customer());
        }

        report.conditions.push(ConditionReport {
            condition: format!("limit_{limit}"),
            metrics: BTreeMap::from([
                ("welfare_cents".to_string(), summarize(&welfare)),
                ("messages_per_customer".to_string(), summarize(&messages)),
                ("businesses_contacted".to_string(), summarize(&contacted)),
            ]),
        });
    }
    Ok(report)
}
