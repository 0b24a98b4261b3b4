//! Dataset container and the versioned JSON file schema shared by the
//! generator, the server, the baseline agents, and the experiment runner.
//!
//! A dataset directory holds four files: `universe.json`, `customers.json`,
//! `businesses.json`, and `ground_truth.json`. Every file carries a
//! `schema_version` field. All money values are integer cents.

use crate::domain::{BusinessRecord, CustomerNeed, ItemSpec};
use crate::economics::{compute_fit, normalize_name};
use crate::money::Money;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

pub const UNIVERSE_FILE: &str = "universe.json";
pub const CUSTOMERS_FILE: &str = "customers.json";
pub const BUSINESSES_FILE: &str = "businesses.json";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported schema_version {found} in {path} (expected {SCHEMA_VERSION})")]
    SchemaVersion { path: String, found: u32 },
    #[error("unknown customer {0:?}")]
    UnknownCustomer(String),
    #[error("unknown business {0:?}")]
    UnknownBusiness(String),
}

/// Per-customer answer key embedded by the generator and re-derived by the
/// linter: the customer's business group, every fully fitting business in
/// the dataset, and the optimal (cheapest fully fitting) choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthEntry {
    /// Businesses generated for this customer, in generation order.
    pub group: Vec<String>,
    /// Every business in the dataset that fully fits this need, sorted by id.
    pub full_fit: Vec<String>,
    pub optimal_business: String,
    pub optimal_price_cents: Money,
}

pub type GroundTruth = BTreeMap<String, GroundTruthEntry>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub domain: String,
    pub universe: Vec<ItemSpec>,
    pub customers: Vec<CustomerNeed>,
    pub businesses: Vec<BusinessRecord>,
    pub ground_truth: GroundTruth,
}

#[derive(Serialize, Deserialize)]
struct UniverseFile {
    schema_version: u32,
    domain: String,
    items: Vec<ItemSpec>,
}

#[derive(Serialize, Deserialize)]
struct CustomersFile {
    schema_version: u32,
    customers: Vec<CustomerNeed>,
}

#[derive(Serialize, Deserialize)]
struct BusinessesFile {
    schema_version: u32,
    businesses: Vec<BusinessRecord>,
}

#[derive(Serialize, Deserialize)]
struct GroundTruthFile {
    schema_version: u32,
    customers: GroundTruth,
}

impl Dataset {
    pub fn customer(&self, id: &str) -> Option<&CustomerNeed> {
        self.customers.iter().find(|c| c.id == id)
    }

    pub fn business(&self, id: &str) -> Option<&BusinessRecord> {
        self.businesses.iter().find(|b| b.id == id)
    }

    pub fn business_by_name(&self, name: &str) -> Option<&BusinessRecord> {
        let wanted = normalize_name(name);
        self.businesses
            .iter()
            .find(|b| normalize_name(&b.name) == wanted)
    }

    /// Businesses carrying every desired item of the need, sorted by id.
    pub fn item_carriers(&self, need: &CustomerNeed) -> Vec<&BusinessRecord> {
        let mut out: Vec<&BusinessRecord> = self
            .businesses
            .iter()
            .filter(|b| b.carries_all(need.desired_item_names()))
            .collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    /// Businesses fully fitting the need (items and amenities), sorted by id.
    /// Fit is evaluated through the same predicate used for utility, against
    /// a proposal covering exactly the desired items.
    pub fn full_fit_businesses(&self, need: &CustomerNeed) -> Vec<&BusinessRecord> {
        self.item_carriers(need)
            .into_iter()
            .filter(|b| {
                let proposal = tailored_proposal(need, b);
                compute_fit(need, &proposal, b)
            })
            .collect()
    }

    /// Re-derive the ground-truth entry for one customer from raw records.
    pub fn derive_ground_truth_entry(
        &self,
        need: &CustomerNeed,
        group: Vec<String>,
    ) -> Option<GroundTruthEntry> {
        let full_fit = self.full_fit_businesses(need);
        let (best_id, best_price) = full_fit
            .iter()
            .filter_map(|b| Some((b.id.clone(), b.total_price_of(need.desired_item_names())?)))
            .min_by(|(ida, pa), (idb, pb)| pa.cmp(pb).then_with(|| ida.cmp(idb)))?;
        Some(GroundTruthEntry {
            group,
            full_fit: full_fit.iter().map(|b| b.id.clone()).collect(),
            optimal_business: best_id,
            optimal_price_cents: best_price,
        })
    }

    pub fn save(&self, dir: &Path) -> Result<(), DatasetError> {
        fs::create_dir_all(dir).map_err(|e| DatasetError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        write_json(
            &dir.join(UNIVERSE_FILE),
            &UniverseFile {
                schema_version: SCHEMA_VERSION,
                domain: self.domain.clone(),
                items: self.universe.clone(),
            },
        )?;
        write_json(
            &dir.join(CUSTOMERS_FILE),
            &CustomersFile {
                schema_version: SCHEMA_VERSION,
                customers: self.customers.clone(),
            },
        )?;
        write_json(
            &dir.join(BUSINESSES_FILE),
            &BusinessesFile {
                schema_version: SCHEMA_VERSION,
                businesses: self.businesses.clone(),
            },
        )?;
        write_json(
            &dir.join(GROUND_TRUTH_FILE),
            &GroundTruthFile {
                schema_version: SCHEMA_VERSION,
                customers: self.ground_truth.clone(),
            },
        )?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Dataset, DatasetError> {
        let universe: UniverseFile = read_json(&dir.join(UNIVERSE_FILE))?;
        let customers: CustomersFile = read_json(&dir.join(CUSTOMERS_FILE))?;
        let businesses: BusinessesFile = read_json(&dir.join(BUSINESSES_FILE))?;
        let ground_truth: GroundTruthFile = read_json(&dir.join(GROUND_TRUTH_FILE))?;
        for (version, file) in [
            (universe.schema_version, UNIVERSE_FILE),
            (customers.schema_version, CUSTOMERS_FILE),
            (businesses.schema_version, BUSINESSES_FILE),
            (ground_truth.schema_version, GROUND_TRUTH_FILE),
        ] {
            if version != SCHEMA_VERSION {
                return Err(DatasetError::SchemaVersion {
                    path: dir.join(file).display().to_string(),
                    found: version,
                });
            }
        }
        Ok(Dataset {
            domain: universe.domain,
            universe: universe.items,
            customers: customers.customers,
            businesses: businesses.businesses,
            ground_truth: ground_truth.customers,
        })
    }
}

/// The proposal a service would send for exactly the need's desired items
/// at its own menu prices. Used for fit/price analysis on raw records.
pub fn tailored_proposal(need: &CustomerNeed, business: &BusinessRecord) -> crate::domain::OrderProposal {
    let line_items: Vec<crate::domain::LineItem> = need
        .desired_item_names()
        .filter_map(|item| {
            business.menu_price(item).map(|price| crate::domain::LineItem {
                item_name: item.to_string(),
                quantity: 1,
                unit_price_cents: price,
            })
        })
        .collect();
    let total = line_items
        .iter()
        .map(|li| li.unit_price_cents * i64::from(li.quantity))
        .sum();
    crate::domain::OrderProposal {
        proposal_id: String::new(),
        from_agent: business.id.clone(),
        to_agent: need.id.clone(),
        line_items,
        total_price_cents: total,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), DatasetError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable dataset value");
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| DatasetError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, DatasetError> {
    let bytes = fs::read(path).map_err(|e| DatasetError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    serde_json::from_slice(&bytes).map_err(|e| DatasetError::Parse {
        path: path.display().to_string(),
        source: e,
    })
}
