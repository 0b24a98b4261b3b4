//! Information-condition baselines. These bypass the protocol and select
//! directly against the dataset: they are controls for what different
//! levels of information (items, prices, amenities) can achieve, not
//! agents.

use agora_core::dataset::{tailored_proposal, Dataset};
use agora_core::domain::{BusinessRecord, CustomerNeed};
use agora_core::economics::compute_utility;
use agora_core::money::Money;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("no candidate business for customer {0}; dataset is corrupt")]
    NoCandidates(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselinePolicy {
    /// Uniform over businesses carrying all desired items.
    RandomItems,
    /// Lowest desired-item total among item carriers; amenities unknown.
    CheapestItems,
    /// Uniform over businesses matching items and amenities.
    RandomItemsAmenities,
    /// Lowest price among fully fitting businesses: the welfare upper bound.
    Optimal,
}

impl BaselinePolicy {
    pub const ALL: [BaselinePolicy; 4] = [
        BaselinePolicy::RandomItems,
        BaselinePolicy::CheapestItems,
        BaselinePolicy::RandomItemsAmenities,
        BaselinePolicy::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselinePolicy::RandomItems => "random_items",
            BaselinePolicy::CheapestItems => "cheapest_items",
            BaselinePolicy::RandomItemsAmenities => "random_items_amenities",
            BaselinePolicy::Optimal => "optimal",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, BaselinePolicy::RandomItems | BaselinePolicy::RandomItemsAmenities)
    }
}

impl std::fmt::Display for BaselinePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineChoice {
    pub business_id: String,
    /// Total desired-item price at the chosen business.
    pub price: Money,
    /// Realized utility of transacting there.
    pub utility: Money,
}

fn choice_for(need: &CustomerNeed, business: &BusinessRecord) -> BaselineChoice {
    let proposal = tailored_proposal(need, business);
    BaselineChoice {
        business_id: business.id.clone(),
        price: proposal.total_price_cents,
        utility: compute_utility(need, &proposal, business),
    }
}

/// Candidate pool for a policy, sorted by business id.
pub fn candidates<'a>(
    policy: BaselinePolicy,
    need: &CustomerNeed,
    dataset: &'a Dataset,
) -> Vec<&'a BusinessRecord> {
    match policy {
        BaselinePolicy::RandomItems | BaselinePolicy::CheapestItems => dataset.item_carriers(need),
        BaselinePolicy::RandomItemsAmenities | BaselinePolicy::Optimal => {
            dataset.full_fit_businesses(need)
        }
    }
}

/// Select a business for one customer under the given policy. Random
/// policies draw from `rng`; deterministic policies ignore it.
pub fn baseline_select(
    policy: BaselinePolicy,
    need: &CustomerNeed,
    dataset: &Dataset,
    rng: &mut ChaCha8Rng,
) -> Result<BaselineChoice, BaselineError> {
    let pool = candidates(policy, need, dataset);
    if pool.is_empty() {
        return Err(BaselineError::NoCandidates(need.id.clone()));
    }
    let chosen = match policy {
        BaselinePolicy::RandomItems | BaselinePolicy::RandomItemsAmenities => {
            pool[rng.gen_range(0..pool.len())]
        }
        BaselinePolicy::CheapestItems | BaselinePolicy::Optimal => pool
            .iter()
            .min_by(|a, b| {
                let pa = a.total_price_of(need.desired_item_names()).unwrap();
                let pb = b.total_price_of(need.desired_item_names()).unwrap();
                pa.cmp(&pb).then_with(|| a.id.cmp(&b.id))
            })
            .unwrap(),
    };
    Ok(choice_for(need, chosen))
}

/// Exact expected utility of the policy for one customer, in cents. Random
/// policies average over their candidate pool; deterministic policies
/// return their pick's utility.
pub fn analytic_expected_utility(
    policy: BaselinePolicy,
    need: &CustomerNeed,
    dataset: &Dataset,
) -> Result<f64, BaselineError> {
    let pool = candidates(policy, need, dataset);
    if pool.is_empty() {
        return Err(BaselineError::NoCandidates(need.id.clone()));
    }
    match policy {
        BaselinePolicy::RandomItems | BaselinePolicy::RandomItemsAmenities => {
            let total: i64 = pool
                .iter()
                .map(|b| choice_for(need, b).utility.cents())
                .sum();
            Ok(total as f64 / pool.len() as f64)
        }
        BaselinePolicy::CheapestItems | BaselinePolicy::Optimal => {
            // Deterministic pick; reuse the selector with a throwaway RNG.
            let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
            Ok(baseline_select(policy, need, dataset, &mut rng)?.utility.cents() as f64)
        }
    }
}

/// Total expected welfare of a policy over the whole dataset, in cents.
pub fn analytic_expected_welfare(
    policy: BaselinePolicy,
    dataset: &Dataset,
) -> Result<f64, BaselineError> {
    dataset
        .customers
        .iter()
        .map(|need| analytic_expected_utility(policy, need, dataset))
        .sum()
}

/// Realized total welfare of one pass of the policy over all customers.
pub fn policy_welfare(
    policy: BaselinePolicy,
    dataset: &Dataset,
    rng: &mut ChaCha8Rng,
) -> Result<Money, BaselineError> {
    let mut total = Money::ZERO;
    for need in &dataset.customers {
        total += baseline_select(policy, need, dataset, rng)?.utility;
    }
    Ok(total)
}

/// Per-customer candidate utilities for a policy, precomputed once so Monte
/// Carlo sweeps don't rescan the dataset every draw.
pub struct PolicyPools {
    per_customer: Vec<Vec<Money>>,
}

impl PolicyPools {
    pub fn build(policy: BaselinePolicy, dataset: &Dataset) -> Result<Self, BaselineError> {
        let per_customer = dataset
            .customers
            .iter()
            .map(|need| {
                let pool = candidates(policy, need, dataset);
                if pool.is_empty() {
                    return Err(BaselineError::NoCandidates(need.id.clone()));
                }
                Ok(pool.iter().map(|b| choice_for(need, b).utility).collect())
            })
            .collect::<Result<Vec<Vec<Money>>, _>>()?;
        Ok(PolicyPools { per_customer })
    }

    /// One welfare sample: a uniform pick per customer.
    pub fn sample_welfare(&self, rng: &mut ChaCha8Rng) -> Money {
        self.per_customer
            .iter()
            .map(|utilities| utilities[rng.gen_range(0..utilities.len())])
            .sum()
    }

    /// Exact expected welfare of uniform selection, in cents.
    pub fn analytic_welfare(&self) -> f64 {
        self.per_customer
            .iter()
            .map(|utilities| {
                utilities.iter().map(|u| u.cents()).sum::<i64>() as f64 / utilities.len() as f64
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use agora_core::domain::MenuItem;
    use rand::SeedableRng;
    use std::collections::BTreeMap;

    fn fixture() -> Dataset {
        let items = |specs: &[(&str, i64)]| -> Vec<MenuItem> {
            specs
                .iter()
                .map(|(n, p)| MenuItem::new(*n, Money::from_cents(*p)).unwrap())
                .collect()
        };
        let businesses = vec![
            BusinessRecord {
                id: "b1".into(),
                name: "Cheap NoFit".into(),
                description: String::new(),
                menu: items(&[("Tacos", 200)]),
                amenities: Default::default(),
            },
            BusinessRecord {
                id: "b2".into(),
                name: "Mid Fit".into(),
                description: String::new(),
                menu: items(&[("Tacos", 300)]),
                amenities: ["Live Music".to_string()].into_iter().collect(),
            },
            BusinessRecord {
                id: "b3".into(),
                name: "Pricey Fit".into(),
                description: String::new(),
                menu: items(&[("Tacos", 500)]),
                amenities: ["Live Music".to_string()].into_iter().collect(),
            },
        ];
        let customer = CustomerNeed {
            id: "c1".into(),
            name: "Alice".into(),
            desired_items: BTreeMap::from([("Tacos".to_string(), Money::from_cents(300))]),
            required_amenities: ["Live Music".to_string()].into_iter().collect(),
            value_cents: Money::from_cents(700),
            nl_request: String::new(),
        };
        Dataset {
            domain: "restaurants".into(),
            universe: vec![],
            customers: vec![customer],
            businesses,
            ground_truth: Default::default(),
        }
    }

    #[test]
    fn optimal_picks_cheapest_full_fit() {
        let dataset = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let choice =
            baseline_select(BaselinePolicy::Optimal, &dataset.customers[0], &dataset, &mut rng)
                .unwrap();
        assert_eq!(choice.business_id, "b2");
        assert_eq!(choice.utility.cents(), 700 - 300);
    }

    #[test]
    fn cheapest_items_ignores_amenities_and_can_go_negative() {
        let dataset = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let choice = baseline_select(
            BaselinePolicy::CheapestItems,
            &dataset.customers[0],
            &dataset,
            &mut rng,
        )
        .unwrap();
        assert_eq!(choice.business_id, "b1");
        assert_eq!(choice.utility.cents(), -200);
    }

    #[test]
    fn random_with_amenities_only_picks_full_fits() {
        let dataset = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let choice = baseline_select(
                BaselinePolicy::RandomItemsAmenities,
                &dataset.customers[0],
                &dataset,
                &mut rng,
            )
            .unwrap();
            assert!(choice.business_id == "b2" || choice.business_id == "b3");
        }
    }

    #[test]
    fn single_full_fit_is_chosen_with_probability_one() {
        let mut dataset = fixture();
        dataset.businesses.remove(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let choice = baseline_select(
                BaselinePolicy::RandomItemsAmenities,
                &dataset.customers[0],
                &dataset,
                &mut rng,
            )
            .unwrap();
            assert_eq!(choice.business_id, "b2");
        }
    }

    #[test]
    fn analytic_means_match_the_pools() {
        let dataset = fixture();
        let need = &dataset.customers[0];
        let random_items =
            analytic_expected_utility(BaselinePolicy::RandomItems, need, &dataset).unwrap();
        // Pool utilities: -200, +400, +200.
        assert!((random_items - (400.0 - 200.0 + 200.0) / 3.0).abs() < 1e-9);
        let random_fit =
            analytic_expected_utility(BaselinePolicy::RandomItemsAmenities, need, &dataset)
                .unwrap();
        assert!((random_fit - 300.0).abs() < 1e-9);
    }

    #[test]
    fn empty_pool_is_a_dataset_corruption_error() {
        let mut dataset = fixture();
        dataset.businesses.clear();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            baseline_select(BaselinePolicy::Optimal, &dataset.customers[0], &dataset, &mut rng),
            Err(BaselineError::NoCandidates("c1".into()))
        );
    }
}
