//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them).

use agora_agents::baselines::{
    analytic_expected_welfare, baseline_select, BaselinePolicy, PolicyPools,
};
use agora_agents::scripted::ScriptedConfig;
use agora_core::dataset::Dataset;
use agora_core::domain::{BusinessRecord, CustomerNeed, ItemSpec, LineItem, MenuItem, OrderProposal};
use agora_core::economics::{compute_fit, compute_utility, compute_value, consumer_welfare};
use agora_core::money::Money;
use agora_core::protocol::{
    decode_request, encode_request, ActionEnvelope, ActionRequest, PaymentDetails, Pricing,
    ProposalDetails, SendBody,
};
use agora_core::search::SearchConfig;
use agora_datagen::config::{Domain, GenerationConfig, Scale};
use agora_experiments::bias::{BiasSelectorKind, BiasStudyConfig};
use agora_experiments::manipulation::ManipulationStudyConfig;
use agora_experiments::runner::{run_market_episodes, MarketRunConfig};
use agora_experiments::{run_bias_study, run_manipulation_study};
use agora_server::{spawn, MarketState, ServerConfig};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

fn criterion(number: u8, name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance criterion {number:02} [{name}]: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} ({name}) failed: {detail}");
}

fn dataset(domain: Domain, scale: Scale, seed: u64) -> Dataset {
    agora_datagen::generate(&GenerationConfig::preset(domain, scale, seed)).unwrap()
}

/// Independent brute-force oracle with its own normalization and fit
/// logic; shares no code with the baseline or search implementations.
fn oracle_optimal(need: &CustomerNeed, businesses: &[BusinessRecord]) -> Option<(String, i64)> {
    fn canon(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
    }
    let mut best: Option<(String, i64)> = None;
    for business in businesses {
        let amenities: Vec<String> = business.amenities.iter().map(|a| canon(a)).collect();
        if !need.required_amenities.iter().all(|r| amenities.contains(&canon(r))) {
            continue;
        }
        let mut total = 0i64;
        let mut ok = true;
        for item in need.desired_items.keys() {
            match business.menu.iter().find(|m| canon(&m.name) == canon(item)) {
                Some(m) => total += m.price_cents.cents(),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let better = match &best {
            None => true,
            Some((id, price)) => total < *price || (total == *price && business.id < *id),
        };
        if better {
            best = Some((business.id.clone(), total));
        }
    }
    best
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut customers_checked = 0;
    for scale in [Scale::Small, Scale::Medium] {
        let data = dataset(Domain::Restaurants, scale, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut baseline_welfare = Money::ZERO;
        let mut oracle_welfare = Money::ZERO;
        for need in &data.customers {
            let choice = baseline_select(BaselinePolicy::Optimal, need, &data, &mut rng).unwrap();
            let (oracle_id, oracle_price) = oracle_optimal(need, &data.businesses).unwrap();
            assert_eq!(choice.business_id, oracle_id, "choice mismatch for {}", need.id);
            assert_eq!(choice.price.cents(), oracle_price);
            baseline_welfare += choice.utility;
            oracle_welfare += need.value_cents - Money::from_cents(oracle_price);
            customers_checked += 1;
        }
        assert_eq!(baseline_welfare, oracle_welfare);
    }
    let elapsed = start.elapsed();
    criterion(
        1,
        "oracle-equivalence",
        elapsed.as_secs() < 10,
        &format!(
            "optimal choice and welfare match brute force on {customers_checked}/133 customers \
             at 33/99 and 100/300 in {elapsed:.2?}"
        ),
    );
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn criterion_02_environment_admits_optimality() {
    let start = Instant::now();
    let data = dataset(Domain::Restaurants, Scale::Small, 7);
    assert_eq!(data.businesses.len(), 99);

    let run = run_market_episodes(&data, MarketRunConfig::default(), |need| {
        ScriptedConfig::new(need.id.clone())
    })
    .await
    .unwrap();
    assert!(!run.flagged(), "no episode may abort");
    run.audit(&data).unwrap();

    let scripted = run.total_welfare();
    let optimal = analytic_expected_welfare(BaselinePolicy::Optimal, &data).unwrap();
    let elapsed = start.elapsed();
    criterion(
        2,
        "environment-admits-optimality",
        scripted.cents() as f64 == optimal && elapsed.as_secs() < 300,
        &format!(
            "scripted assistants + perfect search earned {scripted} vs optimal baseline \
             {} with 99 live service agents in {elapsed:.2?}",
            Money::from_cents(optimal as i64)
        ),
    );
}

#[test]
fn criterion_03_baseline_ordering() {
    // Guaranteed orderings on the default datasets at both scales.
    for scale in [Scale::Small, Scale::Medium] {
        let data = dataset(Domain::Restaurants, scale, 7);
        let optimal = analytic_expected_welfare(BaselinePolicy::Optimal, &data).unwrap();
        let random_fit =
            analytic_expected_welfare(BaselinePolicy::RandomItemsAmenities, &data).unwrap();
        let cheapest = analytic_expected_welfare(BaselinePolicy::CheapestItems, &data).unwrap();
        assert!(optimal >= random_fit && random_fit >= 0.0);
        assert!(optimal >= cheapest);
        // Per-customer dominance of the optimum.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for need in &data.customers {
            let best = baseline_select(BaselinePolicy::Optimal, need, &data, &mut rng).unwrap();
            let cheap = baseline_select(BaselinePolicy::CheapestItems, need, &data, &mut rng).unwrap();
            assert!(best.utility >= cheap.utility);
        }
    }

    // Monte Carlo means of the random policies vs analytic expectations.
    let data = dataset(Domain::Restaurants, Scale::Small, 7);
    let mut mc_details = Vec::new();
    for policy in [BaselinePolicy::RandomItems, BaselinePolicy::RandomItemsAmenities] {
        let pools = PolicyPools::build(policy, &data).unwrap();
        let analytic = pools.analytic_welfare();
        let trials = 1_000;
        let mut samples = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(90_000 + t as u64);
            samples.push(pools.sample_welfare(&mut rng).cents() as f64);
        }
        let mean = samples.iter().sum::<f64>() / trials as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let deviation = (mean - analytic).abs() / se;
        assert!(
            deviation <= 3.0,
            "{policy}: MC mean {mean:.1} vs analytic {analytic:.1} is {deviation:.2} SE away"
        );
        mc_details.push(format!("{policy} {deviation:.2}se"));
    }

    // Cheapest >= random-with-items in expectation over datasets: pooled
    // ensemble across both domains.
    let mut diffs = Vec::new();
    for domain in [Domain::Restaurants, Domain::Contractors] {
        for seed in 1..=40u64 {
            let d = dataset(domain, Scale::Small, seed);
            let cheapest = analytic_expected_welfare(BaselinePolicy::CheapestItems, &d).unwrap();
            let random_items = analytic_expected_welfare(BaselinePolicy::RandomItems, &d).unwrap();
            let optimal = analytic_expected_welfare(BaselinePolicy::Optimal, &d).unwrap();
            diffs.push((cheapest - random_items) / optimal);
        }
    }
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let ensemble_se = (var / n).sqrt();
    criterion(
        3,
        "baseline-ordering",
        mean > 3.0 * ensemble_se,
        &format!(
            "optimal >= random-fit >= 0 and optimal >= cheapest per customer; MC within 3se \
             ({}); cheapest - random_items ensemble mean {:.4} = {:.1} se over 80 datasets",
            mc_details.join(", "),
            mean,
            mean / ensemble_se
        ),
    );
}

#[test]
fn criterion_04_utility_property_suite() {
    const ITEMS: usize = 12;
    const AMENITIES: usize = 6;
    let item_names: Vec<String> = (0..ITEMS).map(|i| format!("Dish Number {i}")).collect();
    let amenity_names: Vec<String> = (0..AMENITIES).map(|a| format!("Amenity {a}")).collect();
    let universe: Vec<ItemSpec> = item_names
        .iter()
        .enumerate()
        .map(|(i, name)| ItemSpec {
            name: name.clone(),
            mean_price_cents: Money::from_cents(200 + 37 * i as i64),
            price_stddev_cents: Money::ZERO,
            desirable: true,
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut cases = 0u32;
    for _ in 0..12_000 {
        // Random need, business, proposal over the shared pools.
        let mut items = item_names.clone();
        items.shuffle(&mut rng);
        let desired: Vec<String> = items.iter().take(rng.gen_range(1..=3)).cloned().collect();
        let mut amenities = amenity_names.clone();
        amenities.shuffle(&mut rng);
        let required: Vec<String> = amenities.iter().take(rng.gen_range(1..=2)).cloned().collect();
        let need = CustomerNeed {
            id: "c".into(),
            name: "n".into(),
            desired_items: desired.iter().map(|i| (i.clone(), Money::from_cents(500))).collect(),
            required_amenities: required.iter().cloned().collect(),
            value_cents: Money::from_cents(rng.gen_range(1..50_000)),
            nl_request: String::new(),
        };
        let business = BusinessRecord {
            id: "b".into(),
            name: "b".into(),
            description: String::new(),
            menu: item_names
                .iter()
                .filter_map(|n| {
                    rng.gen_bool(0.5).then(|| {
                        MenuItem::new(n.clone(), Money::from_cents(rng.gen_range(1..5_000)))
                            .unwrap()
                    })
                })
                .collect(),
            amenities: {
                let mut set = BTreeSet::new();
                for a in &amenity_names {
                    if rng.gen_bool(0.5) {
                        set.insert(a.clone());
                    }
                }
                set
            },
        };
        let proposal_items: Vec<LineItem> = item_names
            .iter()
            .filter_map(|n| {
                rng.gen_bool(0.4).then(|| LineItem {
                    item_name: n.clone(),
                    quantity: rng.gen_range(1..4),
                    unit_price_cents: Money::from_cents(rng.gen_range(1..5_000)),
                })
            })
            .collect();
        if proposal_items.is_empty() {
            continue;
        }
        let proposal = OrderProposal::new("p", "b", "c", proposal_items).unwrap();

        // Fit is all-or-nothing: agrees with direct set containment.
        let fit = compute_fit(&need, &proposal, &business);
        let items_covered = desired.iter().all(|i| proposal.contains_item(i));
        let amenities_covered = required.iter().all(|r| business.amenities.contains(r));
        assert_eq!(fit, items_covered && amenities_covered);
        cases += 1;

        // No fit prices at exactly minus the total.
        let utility = compute_utility(&need, &proposal, &business);
        if !fit {
            assert_eq!(utility, -proposal.total_price_cents);
        } else {
            assert_eq!(utility, need.value_cents - proposal.total_price_cents);
        }
        cases += 1;

        // Alpha linearity for integral alpha.
        let alpha = rng.gen_range(1..=5) as f64;
        let names: Vec<&str> = desired.iter().map(|s| s.as_str()).collect();
        let value = compute_value(names.iter().copied(), &universe, alpha).unwrap();
        let doubled = compute_value(names.iter().copied(), &universe, alpha * 2.0).unwrap();
        assert_eq!(doubled, value.scale(2.0));
        cases += 1;

        // Welfare permutation invariance over a small random batch.
        let tuples = [
            (&need, &proposal, &business),
            (&need, &proposal, &business),
        ];
        let forward = consumer_welfare(tuples.iter().map(|(n, p, b)| (*n, *p, *b)));
        let backward = consumer_welfare(tuples.iter().rev().map(|(n, p, b)| (*n, *p, *b)));
        assert_eq!(forward, backward);
        cases += 1;
    }
    criterion(
        4,
        "utility-property-suite",
        cases >= 10_000,
        &format!("{cases} randomized checks passed (fit, no-fit pricing, alpha linearity, permutation invariance)"),
    );
}

fn random_request(rng: &mut ChaCha8Rng) -> ActionRequest {
    let text = |rng: &mut ChaCha8Rng| -> String {
        let length = rng.gen_range(0..24);
        (0..length)
            .map(|_| char::from_u32(rng.gen_range(0x20..0x7f)).unwrap())
            .collect()
    };
    match rng.gen_range(0..5) {
        0 => ActionRequest::Search { query: text(rng), constraints: text(rng) },
        1 => ActionRequest::Send {
            recipient_id: text(rng),
            body: SendBody::Text { text: text(rng) },
        },
        2 => {
            let items: Vec<LineItem> = (0..rng.gen_range(0..4))
                .map(|i| LineItem {
                    item_name: format!("Item {i}"),
                    quantity: rng.gen_range(1..5),
                    unit_price_cents: Money::from_cents(rng.gen_range(1..10_000)),
                })
                .collect();
            let total = items.iter().map(|li| li.unit_price_cents * i64::from(li.quantity)).sum();
            ActionRequest::Send {
                recipient_id: text(rng),
                body: SendBody::OrderProposal(ProposalDetails {
                    items,
                    pricing: Pricing { total_cents: total, currency: "USD".into() },
                }),
            }
        }
        3 => ActionRequest::Send {
            recipient_id: text(rng),
            body: SendBody::Pay(PaymentDetails { proposal_id: text(rng), method: text(rng) }),
        },
        _ => ActionRequest::Receive,
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn criterion_05_protocol_conformance() {
    // Round trips over the full action union.
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..2_500 {
        let envelope = ActionEnvelope {
            api_token: format!("tok{}", rng.gen_range(0..1_000_000)),
            request: random_request(&mut rng),
        };
        assert_eq!(decode_request(&encode_request(&envelope)).unwrap(), envelope);
    }

    // Live conformance: every advertised action executes; unknown actions
    // and cross-role actions are rejected.
    let mut config = GenerationConfig::preset(Domain::Restaurants, Scale::Small, 5);
    config.n_customers = 2;
    config.universe_size = 40;
    config.desirable_count = 24;
    let data = agora_datagen::generate(&config).unwrap();
    let customer = data.customers[0].clone();
    let service_name = data.businesses[0].name.clone();
    let item = data.businesses[0].menu[0].clone();

    let server = spawn(MarketState::new(Arc::new(data), ServerConfig::default()))
        .await
        .unwrap();
    let client = reqwest::Client::new();
    let base = server.base_url();

    let descriptors: Vec<Value> = client
        .get(format!("{base}/protocol"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(descriptors.len(), 5);

    let register = |name: String| {
        let client = client.clone();
        let base = base.clone();
        async move {
            let body: Value = client
                .post(format!("{base}/register"))
                .json(&json!({"agent_name": name, "service_description": ""}))
                .send()
                .await
                .unwrap()
                .json()
                .await
                .unwrap();
            body["api_token"].as_str().unwrap().to_string()
        }
    };
    let assistant = register(customer.id.clone()).await;
    let service = register(service_name.clone()).await;

    let post = |body: Value| {
        let client = client.clone();
        let base = base.clone();
        async move {
            let response = client.post(format!("{base}/action")).json(&body).send().await.unwrap();
            (response.status().as_u16(), response.json::<Value>().await.unwrap())
        }
    };

    let mut driven: BTreeSet<String> = BTreeSet::new();
    // search
    let (status, _) = post(json!({"api_token": assistant, "action": "search", "query": item.name, "constraints": ""})).await;
    assert_eq!(status, 200);
    driven.insert("search".into());
    // send_text
    let (status, _) = post(json!({"api_token": assistant, "action": "send", "recipient_id": service_name, "message_type": "text", "text": "hello"})).await;
    assert_eq!(status, 200);
    driven.insert("send_text".into());
    // send_order_proposal
    let (status, _) = post(json!({
        "api_token": service, "action": "send", "recipient_id": customer.id,
        "message_type": "order_proposal",
        "order_proposal_details": {
            "items": [{"item_name": item.name, "quantity": 1, "unit_price_cents": item.price_cents.cents()}],
            "pricing": {"total_cents": item.price_cents.cents(), "currency": "USD"},
        },
    }))
    .await;
    assert_eq!(status, 200);
    driven.insert("send_order_proposal".into());
    // receive
    let (status, inbox) = post(json!({"api_token": assistant, "action": "receive"})).await;
    assert_eq!(status, 200);
    driven.insert("receive".into());
    let proposal_id = inbox["messages"]
        .as_array()
        .unwrap()
        .iter()
        .find_map(|m| m["payload"]["proposal"]["proposal_id"].as_str())
        .unwrap()
        .to_string();
    // send_payment
    let (status, _) = post(json!({
        "api_token": assistant, "action": "send", "recipient_id": service_name,
        "message_type": "pay",
        "payment_details": {"proposal_id": proposal_id, "method": "card"},
    }))
    .await;
    assert_eq!(status, 200);
    driven.insert("send_payment".into());

    let advertised: BTreeSet<String> = descriptors
        .iter()
        .map(|d| d["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(driven, advertised, "descriptor list is exhaustive both ways");

    // Vice versa: unadvertised actions are rejected.
    let (status, body) = post(json!({"api_token": assistant, "action": "refund"})).await;
    assert_eq!(status, 400);
    assert!(body["error"].as_str().unwrap().contains("unknown action"));

    // Capability matrix.
    let (status, _) = post(json!({"api_token": service, "action": "search", "query": "x", "constraints": ""})).await;
    assert_eq!(status, 403, "service search denied");
    let (status, _) = post(json!({
        "api_token": assistant, "action": "send", "recipient_id": service_name,
        "message_type": "order_proposal",
        "order_proposal_details": {"items": [{"item_name": "x", "quantity": 1, "unit_price_cents": 1}], "pricing": {"total_cents": 1, "currency": "USD"}},
    }))
    .await;
    assert_eq!(status, 403, "assistant proposal denied");

    server.shutdown().await;
    criterion(
        5,
        "protocol-conformance",
        true,
        "2500 round trips exact; all 5 advertised actions executable and exhaustive; capability matrix enforced",
    );
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn criterion_06_ledger_safety_under_contention() {
    let mut gen_config = GenerationConfig::preset(Domain::Restaurants, Scale::Small, 5);
    gen_config.n_customers = 3;
    gen_config.universe_size = 40;
    gen_config.desirable_count = 24;
    let data = agora_datagen::generate(&gen_config).unwrap();
    let service_names: Vec<String> = data.businesses.iter().take(4).map(|b| b.name.clone()).collect();
    let menu: Vec<(String, i64)> = data
        .businesses
        .iter()
        .take(4)
        .map(|b| (b.menu[0].name.clone(), b.menu[0].price_cents.cents()))
        .collect();

    let mut server_config = ServerConfig::default();
    server_config.action_budget = 100_000;
    let server = spawn(MarketState::new(Arc::new(data), server_config)).await.unwrap();
    let client = reqwest::Client::new();
    let base = server.base_url();

    let register = {
        let client = client.clone();
        let base = base.clone();
        move |name: String| {
            let client = client.clone();
            let base = base.clone();
            async move {
                let body: Value = client
                    .post(format!("{base}/register"))
                    .json(&json!({"agent_name": name, "service_description": ""}))
                    .send()
                    .await
                    .unwrap()
                    .json()
                    .await
                    .unwrap();
                body["api_token"].as_str().unwrap().to_string()
            }
        }
    };
    let post = {
        let client = client.clone();
        let base = base.clone();
        move |body: Value| {
            let client = client.clone();
            let base = base.clone();
            async move {
                let response =
                    client.post(format!("{base}/action")).json(&body).send().await.unwrap();
                (response.status().as_u16(), response.json::<Value>().await.unwrap())
            }
        }
    };

    let payer = register("payer".to_string()).await;
    let mut service_tokens = Vec::new();
    for name in &service_names {
        service_tokens.push(register(name.clone()).await);
    }

    // One proposal, 64 racing duplicate payments.
    let (item, price) = &menu[0];
    let (status, _) = post(json!({
        "api_token": service_tokens[0], "action": "send", "recipient_id": "payer",
        "message_type": "order_proposal",
        "order_proposal_details": {
            "items": [{"item_name": item, "quantity": 1, "unit_price_cents": price}],
            "pricing": {"total_cents": price, "currency": "USD"},
        },
    }))
    .await;
    assert_eq!(status, 200);
    let (_, inbox) = post(json!({"api_token": payer, "action": "receive"})).await;
    let proposal_id = inbox["messages"][0]["payload"]["proposal"]["proposal_id"]
        .as_str()
        .unwrap()
        .to_string();

    let mut tasks = Vec::new();
    for _ in 0..64 {
        let body = json!({
            "api_token": payer, "action": "send", "recipient_id": service_names[0],
            "message_type": "pay",
            "payment_details": {"proposal_id": proposal_id, "method": "card"},
        });
        let post = post.clone();
        tasks.push(tokio::spawn(async move { post(body).await.0 }));
    }
    let mut ok = 0;
    let mut conflict = 0;
    for task in tasks {
        match task.await.unwrap() {
            200 => ok += 1,
            409 => conflict += 1,
            other => panic!("unexpected status {other}"),
        }
    }
    assert_eq!((ok, conflict), (1, 63));

    // Conservation over a randomized concurrent schedule of proposals and
    // duplicate payments across four services.
    let mut expected = *price;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut pay_tasks = Vec::new();
    for round in 0..12 {
        let service_index = rng.gen_range(0..service_names.len());
        let (item, item_price) = &menu[service_index];
        let (status, _) = post(json!({
            "api_token": service_tokens[service_index], "action": "send", "recipient_id": "payer",
            "message_type": "order_proposal",
            "order_proposal_details": {
                "items": [{"item_name": item, "quantity": 1, "unit_price_cents": item_price}],
                "pricing": {"total_cents": item_price, "currency": "USD"},
            },
        }))
        .await;
        assert_eq!(status, 200, "round {round}");
        let (_, inbox) = post(json!({"api_token": payer, "action": "receive"})).await;
        let pid = inbox["messages"]
            .as_array()
            .unwrap()
            .iter()
            .find_map(|m| m["payload"]["proposal"]["proposal_id"].as_str())
            .unwrap()
            .to_string();
        if rng.gen_bool(0.5) {
            expected += item_price;
            for _ in 0..rng.gen_range(1..4) {
                let body = json!({
                    "api_token": payer, "action": "send", "recipient_id": service_names[service_index],
                    "message_type": "pay",
                    "payment_details": {"proposal_id": pid, "method": "card"},
                });
                let post = post.clone();
                pay_tasks.push(tokio::spawn(async move { post(body).await.0 }));
            }
        }
    }
    for task in pay_tasks {
        let status = task.await.unwrap();
        assert!(status == 200 || status == 409);
    }
    let ledger_total: i64 = server
        .state()
        .ledger_transactions()
        .iter()
        .map(|t| t.amount_cents.cents())
        .sum();
    let paid_proposals = server.state().paid_proposal_total().cents();
    assert_eq!(ledger_total, expected);
    assert_eq!(ledger_total, paid_proposals);

    server.shutdown().await;
    criterion(
        6,
        "ledger-safety",
        true,
        &format!(
            "64 racing duplicates settled exactly once (1 ok / 63 conflicts); ledger total \
             {ledger_total} cents equals paid proposal totals under a randomized schedule"
        ),
    );
}

#[test]
fn criterion_07_datagen_invariants() {
    use agora_core::economics::normalize_name;
    let mut regen_checked = 0;
    for (domain, scale) in [
        (Domain::Restaurants, Scale::Small),
        (Domain::Restaurants, Scale::Medium),
        (Domain::Contractors, Scale::Small),
        (Domain::Contractors, Scale::Medium),
    ] {
        let config = GenerationConfig::preset(domain, scale, 7);
        let first = agora_datagen::generate(&config).unwrap();
        let second = agora_datagen::generate(&config).unwrap();

        // Byte-identical regeneration.
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        first.save(dir_a.path()).unwrap();
        second.save(dir_b.path()).unwrap();
        for file in ["universe.json", "customers.json", "businesses.json", "ground_truth.json"] {
            assert_eq!(
                std::fs::read(dir_a.path().join(file)).unwrap(),
                std::fs::read(dir_b.path().join(file)).unwrap(),
                "{domain} {scale} {file}"
            );
        }
        regen_checked += 1;

        // Antichain over desired-item sets.
        let sets: Vec<BTreeSet<String>> = first
            .customers
            .iter()
            .map(|c| c.desired_item_names().map(normalize_name).collect())
            .collect();
        for (i, a) in sets.iter().enumerate() {
            for b in sets.iter().skip(i + 1) {
                assert!(!a.is_subset(b) && !b.is_subset(a));
            }
        }

        // Group full-fit counts, positivity, and ground-truth agreement.
        for need in &first.customers {
            let embedded = &first.ground_truth[&need.id];
            let rederived = first
                .derive_ground_truth_entry(need, embedded.group.clone())
                .unwrap();
            assert_eq!(&rederived, embedded, "{domain} {scale} customer {}", need.id);
            let group_fit = embedded
                .group
                .iter()
                .filter(|id| embedded.full_fit.contains(*id))
                .count();
            assert_eq!(group_fit, config.full_fit_per_group);
            for price in need.desired_items.values() {
                assert!(price.is_positive());
            }
        }
        for business in &first.businesses {
            for item in &business.menu {
                assert!(item.price_cents.is_positive());
            }
        }

        // The linter agrees end to end.
        let report = agora_datagen::lint(&first, Some(&config));
        assert!(report.is_clean(), "{:?}", report.failures);
    }
    criterion(
        7,
        "datagen-invariants",
        regen_checked == 4,
        "byte-identical regeneration, antichain, group fit counts, positivity, and linter \
         ground-truth agreement at both scales and domains",
    );
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn criterion_08_bias_harness_calibration() {
    let data = dataset(Domain::Restaurants, Scale::Small, 7);

    // Uniform-random selector over 300 counterbalanced position trials.
    let position = run_bias_study(
        &data,
        &BiasStudyConfig {
            trials: 300,
            selector: BiasSelectorKind::UniformRandom,
            base_seed: 88,
            ..Default::default()
        },
    )
    .await
    .unwrap();
    assert_eq!(position.extra["abstentions"], 0);
    for entry in position.extra["occupancy"].as_array().unwrap() {
        assert_eq!(entry["count"], 100, "counterbalanced occupancy: {entry}");
    }
    // 99% binomial interval around 1/3 at n=300.
    let half_width = 2.576 * ((1.0 / 3.0) * (2.0 / 3.0) / 300.0_f64).sqrt();
    let mut rates = Vec::new();
    for rank in 1..=3 {
        let rate = position
            .metric(&format!("rank_{rank}"), "selection_rate")
            .unwrap()
            .mean;
        assert!(
            (rate - 1.0 / 3.0).abs() <= half_width,
            "position {rank} rate {rate:.4} outside 1/3 +- {half_width:.4}"
        );
        rates.push(format!("{rate:.3}"));
    }

    // First-accepter over sequenced proposal trials: always rank 1.
    let proposal = run_bias_study(
        &data,
        &BiasStudyConfig {
            kind: agora_datagen::BiasKind::Proposal,
            trials: 99,
            selector: BiasSelectorKind::FirstAccepter,
            base_seed: 88,
            ..Default::default()
        },
    )
    .await
    .unwrap();
    let rank1 = proposal.metric("rank_1", "selection_rate").unwrap().mean;
    let rank1_count = proposal.metric("rank_1", "selections").unwrap().mean;
    assert_eq!(rank1, 1.0, "first-accepter must take rank 1 in every trial");
    assert_eq!(rank1_count, 99.0);

    criterion(
        8,
        "bias-harness-calibration",
        true,
        &format!(
            "uniform selector position rates [{}] within 1/3 +- {half_width:.4} at 300 trials; \
             first-accepter took the first proposal in 99/99 trials",
            rates.join(", ")
        ),
    );
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn criterion_09_manipulation_null_check() {
    let data = dataset(Domain::Restaurants, Scale::Small, 7);
    let config = ManipulationStudyConfig {
        runs: 1,
        base_seed: 9,
        ..Default::default()
    };
    let report = run_manipulation_study(&data, &config).await.unwrap();
    assert!(report.flagged_runs.is_empty());
    assert_eq!(report.conditions.len(), 6);

    let control_payments = &report.condition("control").unwrap().metrics["manipulated_payments"];
    let control_welfare = &report.condition("control").unwrap().metrics["welfare_cents"];
    let mut equal = true;
    for condition in &report.conditions {
        equal &= condition.metrics["manipulated_payments"].per_run == control_payments.per_run;
        equal &= condition.metrics["welfare_cents"].per_run == control_welfare.per_run;
    }
    // Per-group capture tables are identical across arms too.
    let captures = &report.extra["per_run_captures"];
    let control_captures = &captures["control"];
    for strategy in agora_datagen::ManipulationStrategy::ALL {
        equal &= &captures[strategy.name()] == control_captures;
    }
    criterion(
        9,
        "manipulation-null-check",
        equal,
        &format!(
            "description-ignoring assistants paid manipulated businesses identically across all \
             six strategy arms (payments per arm: {:.0}, welfare per arm: {:.0} cents)",
            control_payments.mean + 0.0, control_welfare.mean + 0.0
        ),
    );
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn criterion_10_llm_adapter_conformance() {
    use agora_agents::llm::{run_llm_assistant, LlmAgentConfig, LlmEndpoint};
    use agora_agents::service::{spawn_service_agent, ServiceBehavior};
    use agora_agents::stub::{spawn_stub, StubStep};

    let mut gen_config = GenerationConfig::preset(Domain::Restaurants, Scale::Small, 23);
    gen_config.n_customers = 2;
    gen_config.universe_size = 40;
    gen_config.desirable_count = 24;
    let data = agora_datagen::generate(&gen_config).unwrap();
    let need = data.customers[0].clone();
    let truth = data.ground_truth[&need.id].clone();
    let optimal_name = data.business(&truth.optimal_business).unwrap().name.clone();

    let mut server_config = ServerConfig::default();
    server_config.search = SearchConfig::perfect();
    let server = spawn(MarketState::new(Arc::new(data.clone()), server_config))
        .await
        .unwrap();
    let http = reqwest::Client::new();
    let mut services = Vec::new();
    for business in &data.businesses {
        let behavior = ServiceBehavior {
            poll_interval: std::time::Duration::from_millis(5),
            ..Default::default()
        };
        services.push(
            spawn_service_agent(http.clone(), &server.base_url(), business.clone(), behavior)
                .await
                .unwrap(),
        );
    }

    let items: Vec<String> = need.desired_item_names().map(String::from).collect();
    let amenities: Vec<String> = need.required_amenities.iter().cloned().collect();
    let inquiry = agora_agents::dialogue::build_inquiry(&items, &amenities);
    let script = vec![
        StubStep::ToolCall {
            name: "search".into(),
            arguments: json!({"query": items.join(" "), "constraints": ""}),
        },
        StubStep::ToolCall {
            name: "send_text".into(),
            arguments: json!({"recipient_id": optimal_name, "text": inquiry}),
        },
        StubStep::ToolCall { name: "receive".into(), arguments: json!({}) },
        StubStep::PayLatestProposal,
        StubStep::PayLatestProposal,
        StubStep::PayLatestProposal,
        StubStep::PayLatestProposal,
        StubStep::Text { content: "done".into() },
    ];
    let stub = spawn_stub(script).await.unwrap();
    let endpoint = LlmEndpoint {
        base_url: stub.base_url(),
        model: "canned".into(),
        api_key: None,
    };
    let episode = run_llm_assistant(
        http.clone(),
        &server.base_url(),
        &endpoint,
        &need,
        &LlmAgentConfig::new(need.id.clone()),
    )
    .await
    .unwrap();
    let full_episode_ok = !episode.flagged
        && episode.transacted_business.as_deref() == Some(optimal_name.as_str())
        && episode.utility == need.value_cents - truth.optimal_price_cents
        && server.state().ledger_transactions().len() == 1;

    // Malformed output twice: one reprompt, then fallback receive + flag.
    let malformed_stub = spawn_stub(vec![
        StubStep::Malformed,
        StubStep::Malformed,
        StubStep::Text { content: "giving up".into() },
    ])
    .await
    .unwrap();
    let endpoint = LlmEndpoint {
        base_url: malformed_stub.base_url(),
        model: "canned".into(),
        api_key: None,
    };
    let other = data.customers[1].clone();
    let fallback = run_llm_assistant(
        http.clone(),
        &server.base_url(),
        &endpoint,
        &other,
        &LlmAgentConfig::new(other.id.clone()),
    )
    .await
    .unwrap();
    let fallback_ok = fallback.flagged && fallback.transacted_business.is_none();

    for service in services {
        service.stop().await.unwrap();
    }
    stub.shutdown().await;
    malformed_stub.shutdown().await;
    server.shutdown().await;

    criterion(
        10,
        "llm-adapter-conformance",
        full_episode_ok && fallback_ok,
        "stub endpoint drove search -> inquire -> proposal -> pay to settlement; malformed \
         output fell back to receive and flagged the episode",
    );
}
