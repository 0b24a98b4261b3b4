//! The three-stage synthetic data pipeline: item universe construction,
//! customer synthesis under the antichain constraint, and per-customer
//! business group synthesis.
//!
//! Generation is single-threaded and driven by one seeded RNG so a
//! (config, seed) pair always reproduces byte-identical dataset files.

use crate::config::{ConfigError, GenerationConfig, RendererKind};
use crate::render::{style_seed, Renderer, TemplateRenderer};
use crate::words;
use agora_core::dataset::{Dataset, GroundTruth};
use agora_core::domain::{BusinessRecord, CustomerNeed, ItemSpec, MenuItem};
use agora_core::economics::compute_value;
use agora_core::money::Money;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("antichain constraint unsatisfiable: gave up after {attempts} attempts while sampling customer {customer_index} (desirable pool {pool}); shrink n_customers or grow the universe")]
    AntichainExhausted {
        customer_index: usize,
        attempts: usize,
        pool: usize,
    },
    #[error("generated dataset failed lint: {0}")]
    Lint(String),
    #[error("external renderer requested; call generate_with and supply one")]
    ExternalRendererMissing,
}

const MAX_ANTICHAIN_ATTEMPTS: usize = 10_000;

/// Stage 1: build the item universe with names from the domain wordlist,
/// mean prices drawn uniformly from the configured range, and stddevs
/// proportional to the mean. The first `desirable_count` items form the
/// desirable set; the remainder are distractors.
pub fn build_universe(config: &GenerationConfig, rng: &mut ChaCha8Rng) -> Result<Vec<ItemSpec>, DatagenError> {
    config.validate()?;
    let (mods, bases, forms) = words::for_domain(config.domain).item_parts;
    let capacity = mods.len() * bases.len() * forms.len();
    if config.universe_size > capacity {
        return Err(ConfigError::Invalid(format!(
            "universe_size {} exceeds the {capacity} unique names available",
            config.universe_size
        ))
        .into());
    }

    // Sample unique (modifier, base, form) combinations by index.
    let mut combo_indices: Vec<usize> = (0..capacity).collect();
    combo_indices.shuffle(rng);
    combo_indices.truncate(config.universe_size);

    let (lo, hi) = config.mean_price_range_cents;
    let items = combo_indices
        .into_iter()
        .enumerate()
        .map(|(i, combo)| {
            let form = forms[combo % forms.len()];
            let base = bases[(combo / forms.len()) % bases.len()];
            let modifier = mods[combo / (forms.len() * bases.len())];
            let mean = rng.gen_range(lo..=hi);
            let stddev = Money::from_cents(mean).scale(config.price_stddev_ratio);
            ItemSpec {
                name: format!("{modifier} {base} {form}"),
                mean_price_cents: Money::from_cents(mean),
                price_stddev_cents: stddev,
                desirable: i < config.desirable_count,
            }
        })
        .collect();
    Ok(items)
}

/// Draw a price from the item's truncated normal distribution, rounded to
/// cents and strictly positive (non-positive draws are resampled).
pub fn sample_price(spec: &ItemSpec, rng: &mut ChaCha8Rng) -> Money {
    let mean = spec.mean_price_cents.as_dollars();
    let stddev = spec.price_stddev_cents.as_dollars();
    if stddev == 0.0 {
        return spec.mean_price_cents;
    }
    let dist = Normal::new(mean, stddev).expect("validated stddev");
    loop {
        let draw = Money::from_dollars(dist.sample(rng));
        if draw.is_positive() {
            return draw;
        }
    }
}

/// Stage 2: synthesize customers. Desired-item sets are rejection-sampled
/// until no set is a subset of another (so an order tailored to one
/// customer never satisfies a different customer).
pub fn synth_customers(
    universe: &[ItemSpec],
    config: &GenerationConfig,
    rng: &mut ChaCha8Rng,
    renderer: &dyn Renderer,
) -> Result<Vec<CustomerNeed>, DatagenError> {
    let desirable: Vec<&ItemSpec> = universe.iter().filter(|i| i.desirable).collect();
    let amenity_vocab = words::for_domain(config.domain).amenities;

    let mut accepted_sets: Vec<BTreeSet<String>> = Vec::new();
    let mut customers = Vec::with_capacity(config.n_customers);
    let mut name_pairs: Vec<(usize, usize)> = (0..words::FIRST_NAMES.len())
        .flat_map(|f| (0..words::LAST_NAMES.len()).map(move |l| (f, l)))
        .collect();
    name_pairs.shuffle(rng);

    for customer_index in 0..config.n_customers {
        let mut attempts = 0;
        let chosen: Vec<&ItemSpec> = loop {
            attempts += 1;
            if attempts > MAX_ANTICHAIN_ATTEMPTS {
                return Err(DatagenError::AntichainExhausted {
                    customer_index,
                    attempts,
                    pool: desirable.len(),
                });
            }
            let k = rng.gen_range(1..=3usize.min(desirable.len()));
            let mut picks = desirable.clone();
            picks.shuffle(rng);
            picks.truncate(k);
            let names: BTreeSet<String> = picks
                .iter()
                .map(|i| agora_core::economics::normalize_name(&i.name))
                .collect();
            let clashes = accepted_sets
                .iter()
                .any(|s| s.is_subset(&names) || names.is_subset(s));
            if !clashes {
                accepted_sets.push(names);
                break picks;
            }
        };

        let n_amenities = rng.gen_range(1..=2usize);
        let mut amenities: Vec<&str> = amenity_vocab.to_vec();
        amenities.shuffle(rng);
        amenities.truncate(n_amenities);

        let desired_items: BTreeMap<String, Money> = chosen
            .iter()
            .map(|spec| (spec.name.clone(), sample_price(spec, rng)))
            .collect();

        let item_names: Vec<String> = desired_items.keys().cloned().collect();
        let value = compute_value(
            item_names.iter().map(|s| s.as_str()),
            universe,
            config.alpha,
        )
        .expect("desired items drawn from the universe");

        let (f, l) = name_pairs[customer_index % name_pairs.len()];
        let mut name = format!("{} {}", words::FIRST_NAMES[f], words::LAST_NAMES[l]);
        if customer_index >= name_pairs.len() {
            name = format!("{name} {}", customer_index / name_pairs.len() + 1);
        }

        let amenity_names: Vec<String> = amenities.iter().map(|a| a.to_string()).collect();
        customers.push(CustomerNeed {
            id: format!("c{:03}", customer_index + 1),
            name,
            nl_request: renderer.render_request(config.domain, &item_names, &amenity_names),
            desired_items,
            required_amenities: amenity_names.into_iter().collect(),
            value_cents: value,
        });
    }
    Ok(customers)
}

/// Stage 3: per customer, generate K candidate businesses that all carry the
/// customer's desired items plus distractors, with independently sampled
/// prices. Amenity vectors are assigned so exactly `full_fit_per_group` of
/// the K satisfy every required amenity.
pub fn synth_businesses(
    customers: &[CustomerNeed],
    universe: &[ItemSpec],
    config: &GenerationConfig,
    rng: &mut ChaCha8Rng,
    renderer: &dyn Renderer,
) -> Vec<BusinessRecord> {
    let distractors: Vec<&ItemSpec> = universe.iter().filter(|i| !i.desirable).collect();
    let amenity_vocab = words::for_domain(config.domain).amenities;
    let (prefixes, cores) = words::for_domain(config.domain).business_name_parts;

    let mut name_combos: Vec<usize> = (0..prefixes.len() * cores.len()).collect();
    name_combos.shuffle(rng);

    let mut businesses = Vec::with_capacity(config.business_count());
    let mut business_index = 0;

    for need in customers {
        // Decide which of the K group members fully fit the amenities.
        let mut fit_flags = vec![false; config.businesses_per_customer];
        for flag in fit_flags.iter_mut().take(config.full_fit_per_group) {
            *flag = true;
        }
        fit_flags.shuffle(rng);

        for fully_fits in fit_flags {
            let combo = name_combos[business_index % name_combos.len()];
            let mut name = format!(
                "{} {}",
                prefixes[combo / cores.len()],
                cores[combo % cores.len()]
            );
            if business_index >= name_combos.len() {
                name = format!("{name} {}", business_index / name_combos.len() + 1);
            }

            // Menu: the customer's desired items plus sampled distractors,
            // every price drawn independently from the item distribution.
            let mut menu: Vec<MenuItem> = need
                .desired_item_names()
                .map(|item| {
                    let spec = universe
                        .iter()
                        .find(|s| {
                            agora_core::economics::normalize_name(&s.name)
                                == agora_core::economics::normalize_name(item)
                        })
                        .expect("desired item exists in universe");
                    MenuItem {
                        name: spec.name.clone(),
                        price_cents: sample_price(spec, rng),
                    }
                })
                .collect();
            let mut extra = distractors.clone();
            extra.shuffle(rng);
            for spec in extra.into_iter().take(config.distractors_per_business) {
                menu.push(MenuItem {
                    name: spec.name.clone(),
                    price_cents: sample_price(spec, rng),
                });
            }

            let amenities: BTreeSet<String> = if fully_fits {
                // Required amenities plus a few extras.
                let mut set: BTreeSet<String> = need.required_amenities.clone();
                let mut extras: Vec<&str> = amenity_vocab
                    .iter()
                    .filter(|a| !need.required_amenities.contains(**a))
                    .copied()
                    .collect();
                extras.shuffle(rng);
                for a in extras.into_iter().take(rng.gen_range(0..=3)) {
                    set.insert(a.to_string());
                }
                set
            } else {
                // Drop one required amenity so the fit predicate fails.
                let required: Vec<&String> = need.required_amenities.iter().collect();
                let dropped = required[rng.gen_range(0..required.len())].clone();
                let mut set: BTreeSet<String> = need
                    .required_amenities
                    .iter()
                    .filter(|a| **a != dropped)
                    .cloned()
                    .collect();
                let mut extras: Vec<&str> = amenity_vocab
                    .iter()
                    .filter(|a| !need.required_amenities.contains(**a))
                    .copied()
                    .collect();
                extras.shuffle(rng);
                for a in extras.into_iter().take(rng.gen_range(0..=3)) {
                    set.insert(a.to_string());
                }
                set
            };

            business_index += 1;
            businesses.push(BusinessRecord {
                id: format!("b{business_index:03}"),
                description: renderer.render_business_description(
                    config.domain,
                    &name,
                    style_seed(rng),
                ),
                name,
                menu,
                amenities,
            });
        }
    }
    businesses
}

/// Run the full pipeline with the default template renderer and lint the
/// result before returning it.
pub fn generate(config: &GenerationConfig) -> Result<Dataset, DatagenError> {
    if config.renderer == RendererKind::External {
        return Err(DatagenError::ExternalRendererMissing);
    }
    generate_with(config, &TemplateRenderer)
}

/// Run the full pipeline with a caller-supplied renderer.
pub fn generate_with(config: &GenerationConfig, renderer: &dyn Renderer) -> Result<Dataset, DatagenError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let universe = build_universe(config, &mut rng)?;
    let customers = synth_customers(&universe, config, &mut rng, renderer)?;
    let businesses = synth_businesses(&customers, &universe, config, &mut rng, renderer);

    let mut dataset = Dataset {
        domain: config.domain.to_string(),
        universe,
        customers,
        businesses,
        ground_truth: GroundTruth::new(),
    };
    dataset.ground_truth = derive_ground_truth(&dataset, config.businesses_per_customer);

    let report = crate::lint::lint(&dataset, Some(config));
    if !report.is_clean() {
        return Err(DatagenError::Lint(report.failures.join("; ")));
    }
    Ok(dataset)
}

/// Build the per-customer answer key from the emitted records: group ids in
/// generation order, every full-fit business dataset-wide, and the optimal
/// (cheapest full-fit) choice.
pub fn derive_ground_truth(dataset: &Dataset, group_size: usize) -> GroundTruth {
    dataset
        .customers
        .iter()
        .enumerate()
        .map(|(i, need)| {
            let group: Vec<String> = dataset.businesses
                [i * group_size..(i + 1) * group_size]
                .iter()
                .map(|b| b.id.clone())
                .collect();
            let entry = dataset
                .derive_ground_truth_entry(need, group)
                .expect("generator guarantees at least one full fit");
            (need.id.clone(), entry)
        })
        .collect()
}
