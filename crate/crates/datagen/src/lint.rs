//! Dataset linter: re-derives every guarantee the generator is supposed to
//! provide directly from the emitted records and compares the embedded
//! ground truth against an independent recomputation.

use crate::config::GenerationConfig;
use agora_core::dataset::{tailored_proposal, Dataset};
use agora_core::domain::BusinessRecord;
use agora_core::economics::{compute_fit, normalize_name};
use std::collections::{BTreeMap, BTreeSet, HashSet};

#[derive(Debug, Default)]
pub struct LintReport {
    pub failures: Vec<String>,
    pub checks_run: usize,
}

impl LintReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        self.checks_run += 1;
        if !ok {
            self.failures.push(message());
        }
    }
}

/// Lint a dataset. When the generating config is supplied, group shape and
/// scale expectations are verified as well.
pub fn lint(dataset: &Dataset, config: Option<&GenerationConfig>) -> LintReport {
    let mut report = LintReport::default();

    // Identifier uniqueness.
    let mut item_names = HashSet::new();
    for item in &dataset.universe {
        report.check(item.validate().is_ok(), || {
            format!("universe item {:?} fails validation", item.name)
        });
        report.check(item_names.insert(normalize_name(&item.name)), || {
            format!("duplicate universe item name {:?}", item.name)
        });
    }
    let mut customer_ids = HashSet::new();
    for c in &dataset.customers {
        report.check(customer_ids.insert(c.id.clone()), || {
            format!("duplicate customer id {:?}", c.id)
        });
        report.check(c.validate().is_ok(), || {
            format!("customer {} fails field validation", c.id)
        });
    }
    let mut business_ids = HashSet::new();
    let mut business_names = HashSet::new();
    for b in &dataset.businesses {
        report.check(business_ids.insert(b.id.clone()), || {
            format!("duplicate business id {:?}", b.id)
        });
        report.check(business_names.insert(normalize_name(&b.name)), || {
            format!("duplicate business name {:?}", b.name)
        });
        report.check(b.validate().is_ok(), || {
            format!("business {} fails menu validation", b.id)
        });
    }

    // Desired items must exist in the universe; target prices positive.
    for c in &dataset.customers {
        for (item, price) in &c.desired_items {
            report.check(item_names.contains(&normalize_name(item)), || {
                format!("customer {} desires unknown item {:?}", c.id, item)
            });
            report.check(price.is_positive(), || {
                format!("customer {} has non-positive target price for {:?}", c.id, item)
            });
        }
        report.check(c.value_cents.is_positive(), || {
            format!("customer {} has non-positive value", c.id)
        });
    }

    // Antichain over desired-item sets, and its consequence: an order
    // tailored to one customer never fits another.
    let sets: Vec<(String, BTreeSet<String>)> = dataset
        .customers
        .iter()
        .map(|c| {
            (
                c.id.clone(),
                c.desired_item_names().map(normalize_name).collect(),
            )
        })
        .collect();
    for (i, (id_a, set_a)) in sets.iter().enumerate() {
        for (id_b, set_b) in sets.iter().skip(i + 1) {
            report.check(!set_a.is_subset(set_b) && !set_b.is_subset(set_a), || {
                format!("antichain violation between {id_a} and {id_b}")
            });
        }
    }
    let permissive = BusinessRecord {
        id: "lint-any".into(),
        name: "lint".into(),
        description: String::new(),
        menu: vec![],
        amenities: dataset
            .customers
            .iter()
            .flat_map(|c| c.required_amenities.iter().cloned())
            .collect(),
    };
    for a in &dataset.customers {
        for b in &dataset.customers {
            if a.id == b.id {
                continue;
            }
            // Proposal covering exactly a's items, checked against b's need
            // with every amenity granted: only item coverage can fit, and the
            // antichain makes that impossible.
            let tailored = tailored_proposal(a, &permissive_carrier(a, &permissive));
            report.check(!compute_fit(b, &tailored, &permissive), || {
                format!("tailored proposal for {} cross-satisfies {}", a.id, b.id)
            });
        }
    }

    // Ground-truth coverage and agreement with an independent recomputation.
    report.check(
        dataset.ground_truth.len() == dataset.customers.len(),
        || "ground truth does not cover every customer".to_string(),
    );
    for need in &dataset.customers {
        let Some(embedded) = dataset.ground_truth.get(&need.id) else {
            report.check(false, || format!("missing ground truth for {}", need.id));
            continue;
        };
        for bid in embedded.group.iter().chain(embedded.full_fit.iter()) {
            report.check(business_ids.contains(bid), || {
                format!("ground truth for {} references unknown business {bid}", need.id)
            });
        }
        let rederived = dataset.derive_ground_truth_entry(need, embedded.group.clone());
        match rederived {
            None => report.check(false, || {
                format!("customer {} has no fully fitting business", need.id)
            }),
            Some(fresh) => {
                report.check(fresh == *embedded, || {
                    format!(
                        "ground truth mismatch for {}: embedded {:?} vs recomputed {:?}",
                        need.id, embedded, fresh
                    )
                });
                report.check(!fresh.full_fit.is_empty(), || {
                    format!("customer {} has no fully fitting business", need.id)
                });
                // Value calibration: optimal play must yield positive utility.
                report.check(need.value_cents > fresh.optimal_price_cents, || {
                    format!(
                        "customer {} value {} does not exceed optimal price {}",
                        need.id, need.value_cents, fresh.optimal_price_cents
                    )
                });
            }
        }
    }

    // Cross-business price variation: any item on two or more menus must
    // show at least two distinct prices.
    let mut prices_by_item: BTreeMap<String, BTreeSet<i64>> = BTreeMap::new();
    let mut menus_by_item: BTreeMap<String, usize> = BTreeMap::new();
    for b in &dataset.businesses {
        for item in &b.menu {
            let key = normalize_name(&item.name);
            prices_by_item
                .entry(key.clone())
                .or_default()
                .insert(item.price_cents.cents());
            *menus_by_item.entry(key).or_default() += 1;
        }
    }
    for (item, menus) in &menus_by_item {
        if *menus >= 2 {
            report.check(prices_by_item[item].len() >= 2, || {
                format!("item {item:?} appears on {menus} menus at a single price")
            });
        }
    }

    // Config-dependent shape checks.
    if let Some(config) = config {
        report.check(dataset.customers.len() == config.n_customers, || {
            format!(
                "expected {} customers, found {}",
                config.n_customers,
                dataset.customers.len()
            )
        });
        report.check(dataset.businesses.len() == config.business_count(), || {
            format!(
                "expected {} businesses, found {}",
                config.business_count(),
                dataset.businesses.len()
            )
        });
        for need in &dataset.customers {
            let Some(entry) = dataset.ground_truth.get(&need.id) else {
                continue;
            };
            report.check(entry.group.len() == config.businesses_per_customer, || {
                format!("customer {} has a group of {}", need.id, entry.group.len())
            });
            let group_fit = entry
                .group
                .iter()
                .filter(|bid| entry.full_fit.contains(bid))
                .count();
            report.check(group_fit == config.full_fit_per_group, || {
                format!(
                    "customer {} group has {} full-fit businesses, expected {}",
                    need.id, group_fit, config.full_fit_per_group
                )
            });
            // Every group member carries all the customer's items.
            for bid in &entry.group {
                let carries = dataset
                    .business(bid)
                    .map(|b| b.carries_all(need.desired_item_names()))
                    .unwrap_or(false);
                report.check(carries, || {
                    format!("group business {bid} does not carry all items of {}", need.id)
                });
            }
        }
    }

    report
}

fn permissive_carrier(
    customer: &agora_core::domain::CustomerNeed,
    permissive: &BusinessRecord,
) -> BusinessRecord {
    // Carrier of exactly the customer's items at nominal prices, amenities
    // fully granted, so only item coverage decides cross-fit.
    BusinessRecord {
        id: permissive.id.clone(),
        name: permissive.name.clone(),
        description: String::new(),
        menu: customer
            .desired_item_names()
            .map(|n| agora_core::domain::MenuItem {
                name: n.to_string(),
                price_cents: agora_core::money::Money::from_cents(100),
            })
            .collect(),
        amenities: permissive.amenities.clone(),
    }
}
