//! Study-level behavior on small datasets: welfare equality against the
//! optimal baseline, deterministic reports, consideration monotonicity, the
//! manipulation null check, and bias-harness calibration.

use agora_agents::baselines::{analytic_expected_welfare, BaselinePolicy};
use agora_core::dataset::Dataset;
use agora_datagen::config::{Domain, GenerationConfig, Scale};
use agora_experiments::bias::{BiasSelectorKind, BiasStudyConfig};
use agora_experiments::consideration::ConsiderationStudyConfig;
use agora_experiments::manipulation::ManipulationStudyConfig;
use agora_experiments::welfare::{WelfareCondition, WelfareStudyConfig};
use agora_experiments::{
    run_bias_study, run_consideration_study, run_manipulation_study, run_welfare_study,
};

fn small_dataset(n_customers: usize, seed: u64) -> Dataset {
    let mut config = GenerationConfig::preset(Domain::Restaurants, Scale::Small, seed);
    config.n_customers = n_customers;
    config.universe_size = 60;
    config.desirable_count = 36;
    agora_datagen::generate(&config).unwrap()
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn welfare_study_matches_optimal_and_is_reproducible() {
    let dataset = small_dataset(5, 41);
    let config = WelfareStudyConfig {
        runs: 2,
        base_seed: 11,
        ..Default::default()
    };
    let report = run_welfare_study(&dataset, &config).await.unwrap();
    assert!(report.flagged_runs.is_empty(), "{:?}", report.flagged_runs);

    let optimal = report.metric("optimal", "welfare_cents").unwrap();
    let scripted = report.metric("scripted_perfect", "welfare_cents").unwrap();
    assert_eq!(optimal.std, 0.0, "optimal is deterministic");
    assert_eq!(scripted.std, 0.0, "scripted perfect is deterministic");
    assert_eq!(scripted.mean, optimal.mean, "cent-exact equality");
    assert_eq!(
        optimal.mean,
        analytic_expected_welfare(BaselinePolicy::Optimal, &dataset).unwrap()
    );

    // Lexical is reported and bounded by the optimum.
    let lexical = report.metric("scripted_lexical", "welfare_cents").unwrap();
    assert!(lexical.mean <= optimal.mean);
    assert!(report.metric("scripted_perfect", "messages_per_customer").is_some());

    // The whole study is deterministic: run it again, byte-identical JSON.
    let again = run_welfare_study(&dataset, &config).await.unwrap();
    assert_eq!(
        serde_json::to_vec(&report).unwrap(),
        serde_json::to_vec(&again).unwrap()
    );
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn welfare_study_writes_auditable_event_logs() {
    let dataset = small_dataset(4, 43);
    let log_dir = tempfile::tempdir().unwrap();
    let config = WelfareStudyConfig {
        conditions: vec![WelfareCondition::ScriptedPerfect],
        runs: 1,
        base_seed: 11,
        event_log_dir: Some(log_dir.path().to_path_buf()),
        ..Default::default()
    };
    let report = run_welfare_study(&dataset, &config).await.unwrap();
    let reported = report.metric("scripted_perfect", "welfare_cents").unwrap().mean;

    let log_path = log_dir.path().join("scripted_perfect-run0.ldjson");
    let events = agora_server::read_event_log(&log_path).unwrap();
    let from_log = agora_experiments::audit::welfare_from_events(&events, &dataset).unwrap();
    assert_eq!(from_log.cents() as f64, reported);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn consideration_sweep_is_monotone_for_the_scripted_assistant() {
    let dataset = small_dataset(5, 47);
    let config = ConsiderationStudyConfig {
        result_limits: vec![1, 3, 9],
        runs: 1,
        base_seed: 5,
        ..Default::default()
    };
    let report = run_consideration_study(&dataset, &config).await.unwrap();
    assert!(report.flagged_runs.is_empty());

    let welfare: Vec<f64> = config
        .result_limits
        .iter()
        .map(|l| report.metric(&format!("limit_{l}"), "welfare_cents").unwrap().mean)
        .collect();
    assert!(
        welfare.windows(2).all(|w| w[0] <= w[1]),
        "welfare non-decreasing in the consideration set: {welfare:?}"
    );

    let contacted: Vec<f64> = config
        .result_limits
        .iter()
        .map(|l| report.metric(&format!("limit_{l}"), "businesses_contacted").unwrap().mean)
        .collect();
    for (limit, mean) in config.result_limits.iter().zip(&contacted) {
        assert!(*mean <= *limit as f64 + 1e-9);
    }
    assert!(
        contacted.windows(2).all(|w| w[0] <= w[1]),
        "outreach grows with the consideration set: {contacted:?}"
    );
    let messages: Vec<f64> = config
        .result_limits
        .iter()
        .map(|l| report.metric(&format!("limit_{l}"), "messages_per_customer").unwrap().mean)
        .collect();
    assert!(messages[0] <= messages[messages.len() - 1]);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn manipulation_null_check_is_exactly_flat_for_scripted_assistants() {
    let dataset = small_dataset(4, 53);
    let config = ManipulationStudyConfig {
        runs: 1,
        base_seed: 3,
        ..Default::default()
    };
    let report = run_manipulation_study(&dataset, &config).await.unwrap();
    assert!(report.flagged_runs.is_empty());
    assert_eq!(report.conditions.len(), 6, "all six strategy arms");

    let control_payments = report.metric("control", "manipulated_payments").unwrap();
    let control_welfare = report.metric("control", "welfare_cents").unwrap();
    for condition in &report.conditions {
        let payments = &condition.metrics["manipulated_payments"];
        let welfare = &condition.metrics["welfare_cents"];
        assert_eq!(
            payments.per_run, control_payments.per_run,
            "description-ignoring assistant pays identically under {}",
            condition.condition
        );
        assert_eq!(welfare.per_run, control_welfare.per_run);
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn position_bias_harness_counterbalances_and_calibrates() {
    let dataset = small_dataset(3, 59);
    let config = BiasStudyConfig {
        trials: 30,
        selector: BiasSelectorKind::UniformRandom,
        base_seed: 7,
        ..Default::default()
    };
    let report = run_bias_study(&dataset, &config).await.unwrap();
    assert!(report.flagged_runs.is_empty());
    assert_eq!(report.extra["abstentions"], 0);

    // Counterbalancing: every business occupies every rank trials/3 times.
    for entry in report.extra["occupancy"].as_array().unwrap() {
        assert_eq!(entry["count"], 10, "{entry}");
    }

    // One selection per trial: counts across ranks sum to the trial count.
    let total: f64 = (1..=3)
        .map(|r| report.metric(&format!("rank_{r}"), "selections").unwrap().mean)
        .sum();
    assert_eq!(total, 30.0);
    let rate_total: f64 = (1..=3)
        .map(|r| report.metric(&format!("rank_{r}"), "selection_rate").unwrap().mean)
        .sum();
    assert!((rate_total - 1.0).abs() < 1e-9);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn proposal_bias_first_accepter_always_takes_rank_one() {
    let dataset = small_dataset(3, 61);
    let config = BiasStudyConfig {
        kind: agora_datagen::BiasKind::Proposal,
        trials: 9,
        selector: BiasSelectorKind::FirstAccepter,
        base_seed: 7,
        ..Default::default()
    };
    let report = run_bias_study(&dataset, &config).await.unwrap();
    assert_eq!(report.metric("rank_1", "selections").unwrap().mean, 9.0);
    assert_eq!(report.metric("rank_2", "selections").unwrap().mean, 0.0);
    assert_eq!(report.metric("rank_3", "selections").unwrap().mean, 0.0);
    assert_eq!(report.metric("rank_1", "selection_rate").unwrap().mean, 1.0);
}
