//! Experiment orchestration for the agora marketplace: the welfare,
//! consideration-set, competitive-manipulation, and bias studies, with
//! mean/std aggregation over repeated seeded runs and an event-log audit
//! behind every reported welfare figure.

pub mod audit;
pub mod bias;
pub mod config;
pub mod consideration;
pub mod manipulation;
pub mod report;
pub mod runner;
pub mod welfare;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Runner(#[from] runner::RunnerError),
    #[error(transparent)]
    Audit(#[from] audit::AuditError),
    #[error(transparent)]
    Baseline(#[from] agora_agents::baselines::BaselineError),
    #[error(transparent)]
    Bias(#[from] agora_datagen::bias::BiasError),
    #[error(transparent)]
    Manipulation(#[from] agora_datagen::manipulate::ManipulationError),
    #[error(transparent)]
    Report(#[from] report::ReportError),
    #[error("invalid study configuration: {0}")]
    Config(String),
}

pub use bias::{run_bias_study, BiasSelectorKind, BiasStudyConfig};
pub use config::{StudyFile, StudyKind};
pub use consideration::{run_consideration_study, ConsiderationStudyConfig};
pub use manipulation::{manipulation_targets, run_manipulation_study, ManipulationStudyConfig};
pub use report::{aggregate, summary_rows, write_csv, ExperimentReport};
pub use runner::{run_market_episodes, MarketRun, MarketRunConfig};
pub use welfare::{run_welfare_study, WelfareCondition, WelfareStudyConfig};
