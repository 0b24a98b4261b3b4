//! Generation configuration with per-scale presets.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("unknown domain {0:?} (expected restaurants or contractors)")]
    UnknownDomain(String),
    #[error("unknown scale {0:?} (expected small or medium)")]
    UnknownScale(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Restaurants,
    Contractors,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Restaurants => write!(f, "restaurants"),
            Domain::Contractors => write!(f, "contractors"),
        }
    }
}

impl FromStr for Domain {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "restaurants" | "restaurant" | "mexican" => Ok(Domain::Restaurants),
            "contractors" | "contractor" => Ok(Domain::Contractors),
            other => Err(ConfigError::UnknownDomain(other.to_string())),
        }
    }
}

/// Market scale presets: small is 33 customers / 99 businesses, medium is
/// 100 customers / 300 businesses (with the default 3 businesses per
/// customer group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Small,
    Medium,
}

impl Scale {
    pub fn n_customers(self) -> usize {
        match self {
            Scale::Small => 33,
            Scale::Medium => 100,
        }
    }

    fn universe_size(self) -> usize {
        match self {
            Scale::Small => 100,
            Scale::Medium => 220,
        }
    }

    fn desirable_count(self) -> usize {
        match self {
            Scale::Small => 60,
            Scale::Medium => 150,
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scale::Small => write!(f, "small"),
            Scale::Medium => write!(f, "medium"),
        }
    }
}

impl FromStr for Scale {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "small" => Ok(Scale::Small),
            "medium" => Ok(Scale::Medium),
            other => Err(ConfigError::UnknownScale(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RendererKind {
    #[default]
    Template,
    /// External text renderer plugged in by the caller (e.g. an LLM).
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub domain: Domain,
    pub seed: u64,
    pub n_customers: usize,
    /// Candidate businesses generated per customer (K).
    pub businesses_per_customer: usize,
    /// Item universe size (N), including the distractor pool.
    pub universe_size: usize,
    /// How many universe items are desirable; the rest are distractors.
    pub desirable_count: usize,
    /// Distractor items added to each business menu.
    pub distractors_per_business: usize,
    /// Of each customer's K businesses, how many satisfy all amenities.
    pub full_fit_per_group: usize,
    /// Value calibration multiplier applied to the desired items' mean total.
    pub alpha: f64,
    /// Item price stddev as a fraction of its mean.
    pub price_stddev_ratio: f64,
    /// Mean menu price range in cents, inclusive.
    pub mean_price_range_cents: (i64, i64),
    pub renderer: RendererKind,
}

impl GenerationConfig {
    pub fn preset(domain: Domain, scale: Scale, seed: u64) -> Self {
        let mean_price_range_cents = match domain {
            Domain::Restaurants => (400, 2800),
            Domain::Contractors => (8_000, 90_000),
        };
        GenerationConfig {
            domain,
            seed,
            n_customers: scale.n_customers(),
            businesses_per_customer: 3,
            universe_size: scale.universe_size(),
            desirable_count: scale.desirable_count(),
            distractors_per_business: 3,
            full_fit_per_group: 2,
            alpha: 2.0,
            price_stddev_ratio: 0.15,
            mean_price_range_cents,
            renderer: RendererKind::Template,
        }
    }

    pub fn business_count(&self) -> usize {
        self.n_customers * self.businesses_per_customer
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_customers == 0 {
            return Err(ConfigError::Invalid("n_customers must be at least 1".into()));
        }
        if self.businesses_per_customer == 0 {
            return Err(ConfigError::Invalid(
                "businesses_per_customer must be at least 1".into(),
            ));
        }
        if self.full_fit_per_group == 0 || self.full_fit_per_group > self.businesses_per_customer {
            return Err(ConfigError::Invalid(format!(
                "full_fit_per_group must be in 1..={}",
                self.businesses_per_customer
            )));
        }
        if self.desirable_count > self.universe_size {
            return Err(ConfigError::Invalid(
                "desirable_count cannot exceed universe_size".into(),
            ));
        }
        let distractor_pool = self.universe_size - self.desirable_count;
        if distractor_pool < self.distractors_per_business {
            return Err(ConfigError::Invalid(format!(
                "universe too small: need at least {} distractor items, have {}",
                self.distractors_per_business, distractor_pool
            )));
        }
        // Rough feasibility floor for the antichain rejection sampler: each
        // customer consumes up to 3 desirable items.
        if self.desirable_count < 3 {
            return Err(ConfigError::Invalid(
                "desirable_count must be at least 3".into(),
            ));
        }
        if self.alpha <= 1.0 {
            return Err(ConfigError::Invalid(
                "alpha must exceed 1 so optimal play yields positive utility".into(),
            ));
        }
        if self.price_stddev_ratio < 0.0 {
            return Err(ConfigError::Invalid("price_stddev_ratio must be >= 0".into()));
        }
        if self.mean_price_range_cents.0 <= 0
            || self.mean_price_range_cents.1 < self.mean_price_range_cents.0
        {
            return Err(ConfigError::Invalid(
                "mean_price_range_cents must be a positive non-empty range".into(),
            ));
        }
        Ok(())
    }
}
