//! Bias-experiment dataset variants: position trials over identical
//! businesses in permuted search order, and proposal trials over fixed
//! response-delay ranks.

use agora_core::dataset::Dataset;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BiasError {
    #[error("unknown customer id {0:?}")]
    UnknownCustomer(String),
    #[error("customer {0:?} has no full-fit business to clone")]
    NoFullFit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasKind {
    Position,
    Proposal,
}

impl std::str::FromStr for BiasKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "position" => Ok(BiasKind::Position),
            "proposal" => Ok(BiasKind::Proposal),
            other => Err(format!("unknown bias kind {other:?} (expected position or proposal)")),
        }
    }
}

/// Harness-facing spec emitted alongside a bias-variant dataset. The
/// position schedule cycles each business through each rank so every
/// (business, rank) pair occurs equally often across trials; the proposal
/// schedule assigns response-delay ranks the service harness honors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasSpec {
    pub schema_version: u32,
    pub kind: BiasKind,
    pub customer_id: String,
    /// The customer's group, in id order.
    pub business_ids: Vec<String>,
    /// Cyclic Latin-square schedule: trial t presents businesses in order
    /// `permutations[t % len]` (indices into `business_ids`).
    pub permutations: Vec<Vec<usize>>,
    /// Proposal ranks 1..=K by business id (base assignment; the harness
    /// counterbalances by rotating it per trial).
    pub delay_ranks: BTreeMap<String, u8>,
}

/// Build a bias-variant dataset for one customer: the customer's group
/// businesses become field-identical clones of its optimal business
/// (differing only in id and name), so selection can only be driven by
/// presentation order or arrival order. Ground truth is re-derived.
pub fn make_bias_variant(
    dataset: &Dataset,
    kind: BiasKind,
    customer_id: &str,
) -> Result<(Dataset, BiasSpec), BiasError> {
    let mut out = dataset.clone();
    let entry = dataset
        .ground_truth
        .get(customer_id)
        .ok_or_else(|| BiasError::UnknownCustomer(customer_id.to_string()))?;
    let base = dataset
        .business(&entry.optimal_business)
        .ok_or_else(|| BiasError::NoFullFit(customer_id.to_string()))?
        .clone();

    let mut group = entry.group.clone();
    group.sort();
    for bid in &group {
        let b = out
            .businesses
            .iter_mut()
            .find(|b| &b.id == bid)
            .expect("group ids exist");
        b.menu = base.menu.clone();
        b.amenities = base.amenities.clone();
        b.description = base.description.clone();
    }

    // Cloning may change which businesses fit other customers; refresh the
    // whole answer key from the mutated records.
    let group_size = entry.group.len();
    out.ground_truth = crate::pipeline::derive_ground_truth(&out, group_size);

    let k = group.len();
    let permutations: Vec<Vec<usize>> = (0..k)
        .map(|rot| (0..k).map(|i| (i + rot) % k).collect())
        .collect();
    let delay_ranks: BTreeMap<String, u8> = group
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), (i + 1) as u8))
        .collect();

    let spec = BiasSpec {
        schema_version: agora_core::dataset::SCHEMA_VERSION,
        kind,
        customer_id: customer_id.to_string(),
        business_ids: group,
        permutations,
        delay_ranks,
    };
    Ok((out, spec))
}
