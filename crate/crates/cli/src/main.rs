//! `agora` — operator surface for the marketplace environment.
//!
//! Subcommands: `datagen` writes a linted synthetic dataset, `serve` hosts
//! the three market endpoints over a dataset, `run` executes a study and
//! writes its report artifacts. Exit codes: 0 success, 1 usage,
//! 2 lint/validation, 3 runtime abort.

mod manifest;

use agora_core::dataset::Dataset;
use agora_core::search::{SearchMode, Weighting};
use agora_datagen::config::{Domain, GenerationConfig, Scale};
use agora_experiments::bias::{BiasSelectorKind, BiasStudyConfig};
use agora_experiments::consideration::ConsiderationStudyConfig;
use agora_experiments::manipulation::ManipulationStudyConfig;
use agora_experiments::welfare::{WelfareCondition, WelfareStudyConfig};
use agora_experiments::{ExperimentReport, StudyFile, StudyKind};
use agora_server::{MarketState, ServerConfig};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "agora", version, about = "Two-sided agentic marketplace environment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and lint it.
    Datagen(DatagenArgs),
    /// Serve the market endpoints over a dataset.
    Serve(ServeArgs),
    /// Run a study and write report artifacts.
    Run(RunArgs),
}

#[derive(Args)]
struct DatagenArgs {
    /// restaurants | contractors
    #[arg(long, default_value = "restaurants")]
    domain: String,
    /// small (33/99) | medium (100/300)
    #[arg(long, default_value = "small")]
    scale: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory for the dataset files.
    #[arg(long)]
    out: PathBuf,
    /// Value calibration multiplier.
    #[arg(long)]
    alpha: Option<f64>,
    /// Candidate businesses per customer (K).
    #[arg(long)]
    businesses_per_customer: Option<usize>,
    /// Full-fit businesses per customer group.
    #[arg(long)]
    full_fit: Option<usize>,
    /// Distractor items per business menu.
    #[arg(long)]
    distractors: Option<usize>,
}

#[derive(Args)]
struct ServeArgs {
    /// Dataset directory to host.
    #[arg(long)]
    dataset: PathBuf,
    /// Server config JSON; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    port: Option<u16>,
    /// Per-agent cap on search/send actions.
    #[arg(long)]
    budget: Option<u32>,
    /// lexical | perfect
    #[arg(long)]
    search_mode: Option<String>,
    /// Consideration-set cap for search results.
    #[arg(long)]
    result_limit: Option<usize>,
    #[arg(long)]
    page_size: Option<usize>,
    /// overlap | bm25
    #[arg(long)]
    weighting: Option<String>,
    /// Append the run's event log here (line-delimited JSON).
    #[arg(long)]
    event_log: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// welfare | consideration | manipulation | bias
    #[arg(long)]
    study: Option<String>,
    #[arg(long)]
    dataset: PathBuf,
    /// Artifact directory (report.json, summary.csv, manifest.json, logs).
    #[arg(long)]
    out: PathBuf,
    /// Study config JSON; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Welfare: comma-separated condition names.
    #[arg(long, value_delimiter = ',')]
    conditions: Option<Vec<String>>,
    /// Consideration: comma-separated result limits.
    #[arg(long, value_delimiter = ',')]
    limits: Option<Vec<usize>>,
    /// Manipulation: comma-separated strategy names.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    /// Bias: position | proposal
    #[arg(long)]
    kind: Option<String>,
    /// Bias: uniform-random | first-accepter
    #[arg(long)]
    policy: Option<String>,
    /// Bias: trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Bias: subject customer id.
    #[arg(long)]
    customer: Option<String>,
    /// Skip writing per-run event logs.
    #[arg(long)]
    no_event_logs: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Datagen(args) => cmd_datagen(args),
        Command::Serve(args) => cmd_serve(args),
        Command::Run(args) => cmd_run(args),
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

// ---------------------------------------------------------------------------
// datagen

fn cmd_datagen(args: DatagenArgs) -> ExitCode {
    let domain: Domain = match args.domain.parse() {
        Ok(d) => d,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let scale: Scale = match args.scale.parse() {
        Ok(s) => s,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let mut config = GenerationConfig::preset(domain, scale, args.seed);
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    if let Some(k) = args.businesses_per_customer {
        config.businesses_per_customer = k;
    }
    if let Some(full_fit) = args.full_fit {
        config.full_fit_per_group = full_fit;
    }
    if let Some(distractors) = args.distractors {
        config.distractors_per_business = distractors;
    }

    let dataset = match agora_datagen::generate(&config) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    if let Err(e) = dataset.save(&args.out) {
        return fail(EXIT_VALIDATION, e);
    }
    // Re-lint the emitted files end to end, exactly as a consumer would
    // load them.
    let reloaded = match Dataset::load(&args.out) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let report = agora_datagen::lint(&reloaded, Some(&config));
    let lint_json = serde_json::json!({
        "clean": report.is_clean(),
        "checks_run": report.checks_run,
        "failures": report.failures,
    });
    let config_json = serde_json::to_string_pretty(&config).expect("config serializes");
    if std::fs::write(args.out.join("generation_config.json"), config_json + "\n").is_err()
        || std::fs::write(
            args.out.join("lint_report.json"),
            serde_json::to_string_pretty(&lint_json).unwrap() + "\n",
        )
        .is_err()
    {
        return fail(EXIT_VALIDATION, "cannot write dataset metadata");
    }
    if !report.is_clean() {
        return fail(
            EXIT_VALIDATION,
            format!("lint failed: {}", report.failures.join("; ")),
        );
    }
    println!(
        "dataset: {} {} seed {} -> {} customers, {} businesses, {} items",
        domain,
        scale,
        config.seed,
        dataset.customers.len(),
        dataset.businesses.len(),
        dataset.universe.len(),
    );
    println!("lint: clean ({} checks)", report.checks_run);
    println!("wrote {}", args.out.display());
    ExitCode::SUCCESS
}

// ---------------------------------------------------------------------------
// serve

fn cmd_serve(args: ServeArgs) -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "info".into()),
        )
        .init();

    let mut config = match &args.config {
        Some(path) => match ServerConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(EXIT_VALIDATION, e),
        },
        None => ServerConfig::default(),
    };
    if let Some(port) = args.port {
        config.port = port;
    }
    if let Some(budget) = args.budget {
        config.action_budget = budget;
    }
    if let Some(mode) = &args.search_mode {
        config.search.mode = match mode.to_lowercase().as_str() {
            "lexical" => SearchMode::Lexical,
            "perfect" => SearchMode::Perfect,
            other => return fail(EXIT_USAGE, format!("unknown search mode {other:?}")),
        };
        if config.search.mode == SearchMode::Perfect && config.search.result_limit.is_none() {
            config.search.result_limit = Some(3);
        }
    }
    if let Some(limit) = args.result_limit {
        config.search.result_limit = Some(limit);
    }
    if let Some(page_size) = args.page_size {
        config.search.page_size = page_size;
    }
    if let Some(weighting) = &args.weighting {
        config.search.weighting = match weighting.to_lowercase().as_str() {
            "overlap" => Weighting::Overlap,
            "bm25" => Weighting::Bm25,
            other => return fail(EXIT_USAGE, format!("unknown weighting {other:?}")),
        };
    }
    if args.event_log.is_some() {
        config.event_log_path = args.event_log.clone();
    }

    let dataset = match Dataset::load(&args.dataset) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };

    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    let result: Result<(), String> = runtime.block_on(async move {
        let state = MarketState::new(Arc::new(dataset), config);
        let server = agora_server::spawn(state).await.map_err(|e| e.to_string())?;
        println!("market listening on http://{}", server.addr);
        tokio::signal::ctrl_c().await.map_err(|e| e.to_string())?;
        println!("shutting down");
        server.shutdown().await;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_RUNTIME, e),
    }
}

// ---------------------------------------------------------------------------
// run

fn cmd_run(args: RunArgs) -> ExitCode {
    let mut study_file = match &args.config {
        Some(path) => match StudyFile::load(path) {
            Ok(f) => f,
            Err(e) => return fail(EXIT_VALIDATION, e),
        },
        None => StudyFile::default(),
    };
    // Flags win over the config file.
    if let Some(study) = &args.study {
        study_file.study = match study.parse() {
            Ok(s) => Some(s),
            Err(e) => return fail(EXIT_USAGE, e),
        };
    }
    if args.runs.is_some() {
        study_file.runs = args.runs;
    }
    if args.seed.is_some() {
        study_file.seed = args.seed;
    }
    if args.parallelism.is_some() {
        study_file.parallelism = args.parallelism;
    }
    if args.conditions.is_some() {
        study_file.conditions = args.conditions.clone();
    }
    if args.limits.is_some() {
        study_file.result_limits = args.limits.clone();
    }
    if args.strategies.is_some() {
        study_file.strategies = args.strategies.clone();
    }
    if args.kind.is_some() {
        study_file.bias_kind = args.kind.clone();
    }
    if args.policy.is_some() {
        study_file.policy = args.policy.clone();
    }
    if args.trials.is_some() {
        study_file.trials = args.trials;
    }
    if args.customer.is_some() {
        study_file.customer_id = args.customer.clone();
    }
    let Some(study) = study_file.study else {
        return fail(EXIT_USAGE, "no study selected; pass --study or set it in --config");
    };

    let dataset = match Dataset::load(&args.dataset) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    if std::fs::create_dir_all(&args.out).is_err() {
        return fail(EXIT_VALIDATION, format!("cannot create {}", args.out.display()));
    }
    let event_log_dir = if args.no_event_logs || study == StudyKind::Bias {
        None
    } else {
        let dir = args.out.join("event_logs");
        if std::fs::create_dir_all(&dir).is_err() {
            return fail(EXIT_VALIDATION, format!("cannot create {}", dir.display()));
        }
        Some(dir)
    };

    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    let report = runtime.block_on(dispatch_study(study, &dataset, &study_file, event_log_dir));
    let report = match report {
        Ok(r) => r,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };

    let report_path = args.out.join("report.json");
    let csv_path = args.out.join("summary.csv");
    if let Err(e) = report.save_json(&report_path) {
        return fail(EXIT_RUNTIME, e);
    }
    let rows = agora_experiments::summary_rows(&report);
    if let Err(e) = agora_experiments::write_csv(&rows, &csv_path) {
        return fail(EXIT_RUNTIME, e);
    }
    if let Err(e) = manifest::write_manifest(&args.out, &args.dataset, &study_file, &report) {
        return fail(EXIT_RUNTIME, e);
    }

    for row in &rows {
        println!(
            "{:>24} {:>28} mean {:>14.2} std {:>12.2} n {}",
            row.condition, row.metric, row.mean, row.std, row.n
        );
    }
    println!("wrote {}", report_path.display());

    if !report.flagged_runs.is_empty() {
        return fail(
            EXIT_RUNTIME,
            format!("{} run(s) aborted: {:?}", report.flagged_runs.len(), report.flagged_runs),
        );
    }
    ExitCode::SUCCESS
}

async fn dispatch_study(
    study: StudyKind,
    dataset: &Dataset,
    file: &StudyFile,
    event_log_dir: Option<PathBuf>,
) -> Result<ExperimentReport, String> {
    match study {
        StudyKind::Welfare => {
            let mut config = WelfareStudyConfig::default();
            if let Some(names) = &file.conditions {
                config.conditions = names
                    .iter()
                    .map(|n| n.parse::<WelfareCondition>())
                    .collect::<Result<Vec<_>, String>>()?;
            }
            apply_common(&mut config.runs, &mut config.base_seed, &mut config.parallelism, file);
            if file.lexical_fetch_limit.is_some() {
                config.lexical_fetch_limit = file.lexical_fetch_limit;
            }
            config.event_log_dir = event_log_dir;
            agora_experiments::run_welfare_study(dataset, &config)
                .await
                .map_err(|e| e.to_string())
        }
        StudyKind::Consideration => {
            let mut config = ConsiderationStudyConfig::default();
            if let Some(limits) = &file.result_limits {
                config.result_limits = limits.clone();
            }
            apply_common(&mut config.runs, &mut config.base_seed, &mut config.parallelism, file);
            config.event_log_dir = event_log_dir;
            agora_experiments::run_consideration_study(dataset, &config)
                .await
                .map_err(|e| e.to_string())
        }
        StudyKind::Manipulation => {
            let mut config = ManipulationStudyConfig::default();
            if let Some(strategies) = &file.strategies {
                config.strategies = strategies
                    .iter()
                    .map(|s| s.parse::<agora_datagen::ManipulationStrategy>())
                    .collect::<Result<Vec<_>, agora_datagen::manipulate::ManipulationError>>()
                    .map_err(|e| e.to_string())?;
            }
            apply_common(&mut config.runs, &mut config.base_seed, &mut config.parallelism, file);
            config.event_log_dir = event_log_dir;
            agora_experiments::run_manipulation_study(dataset, &config)
                .await
                .map_err(|e| e.to_string())
        }
        StudyKind::Bias => {
            let mut config = BiasStudyConfig::default();
            if let Some(kind) = &file.bias_kind {
                config.kind = kind.parse().map_err(|e: String| e)?;
            }
            if let Some(policy) = &file.policy {
                config.selector = policy.parse::<BiasSelectorKind>()?;
            }
            if let Some(trials) = file.trials {
                config.trials = trials;
            }
            if let Some(seed) = file.seed {
                config.base_seed = seed;
            }
            config.customer_id = file.customer_id.clone();
            agora_experiments::run_bias_study(dataset, &config)
                .await
                .map_err(|e| e.to_string())
        }
    }
}

fn apply_common(runs: &mut usize, base_seed: &mut u64, parallelism: &mut usize, file: &StudyFile) {
    if let Some(r) = file.runs {
        *runs = r;
    }
    if let Some(s) = file.seed {
        *base_seed = s;
    }
    if let Some(p) = file.parallelism {
        *parallelism = p;
    }
}
