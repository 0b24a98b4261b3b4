//! Domain records for the two-sided market: items, businesses, customer
//! needs, order proposals, and ledger transactions.

use crate::money::Money;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("menu item name must be non-empty")]
    EmptyItemName,
    #[error("price must be strictly positive, got {0}")]
    NonPositivePrice(Money),
    #[error("duplicate item name {0:?}")]
    DuplicateItemName(String),
    #[error("unknown item {0:?} in universe lookup")]
    UnknownItem(String),
    #[error("proposal total {declared} does not match line items ({computed})")]
    TotalMismatch { declared: Money, computed: Money },
    #[error("line item quantity must be at least 1")]
    ZeroQuantity,
    #[error("customer need must name 1-3 desired items, got {0}")]
    BadDesiredItemCount(usize),
    #[error("customer need must name 1-2 required amenities, got {0}")]
    BadAmenityCount(usize),
}

/// One entry on a business menu (or contractor service list).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MenuItem {
    pub name: String,
    pub price_cents: Money,
}

impl MenuItem {
    pub fn new(name: impl Into<String>, price_cents: Money) -> Result<Self, DomainError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(DomainError::EmptyItemName);
        }
        if !price_cents.is_positive() {
            return Err(DomainError::NonPositivePrice(price_cents));
        }
        Ok(MenuItem { name, price_cents })
    }
}

/// An item in the generated universe with its price distribution parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemSpec {
    pub name: String,
    pub mean_price_cents: Money,
    pub price_stddev_cents: Money,
    pub desirable: bool,
}

impl ItemSpec {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.name.trim().is_empty() {
            return Err(DomainError::EmptyItemName);
        }
        if !self.mean_price_cents.is_positive() {
            return Err(DomainError::NonPositivePrice(self.mean_price_cents));
        }
        if self.price_stddev_cents < Money::ZERO {
            return Err(DomainError::NonPositivePrice(self.price_stddev_cents));
        }
        Ok(())
    }
}

/// A business listing: identity, searchable description, menu, amenities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusinessRecord {
    pub id: String,
    pub name: String,
    pub description: String,
    pub menu: Vec<MenuItem>,
    pub amenities: BTreeSet<String>,
}

impl BusinessRecord {
    pub fn validate(&self) -> Result<(), DomainError> {
        let mut seen = HashSet::new();
        for item in &self.menu {
            if item.name.trim().is_empty() {
                return Err(DomainError::EmptyItemName);
            }
            if !item.price_cents.is_positive() {
                return Err(DomainError::NonPositivePrice(item.price_cents));
            }
            if !seen.insert(crate::economics::normalize_name(&item.name)) {
                return Err(DomainError::DuplicateItemName(item.name.clone()));
            }
        }
        Ok(())
    }

    pub fn menu_price(&self, item_name: &str) -> Option<Money> {
        let wanted = crate::economics::normalize_name(item_name);
        self.menu
            .iter()
            .find(|i| crate::economics::normalize_name(&i.name) == wanted)
            .map(|i| i.price_cents)
    }

    pub fn carries_all(&self, item_names: impl IntoIterator<Item = impl AsRef<str>>) -> bool {
        item_names
            .into_iter()
            .all(|n| self.menu_price(n.as_ref()).is_some())
    }

    /// Total menu price of the given items; None if any is not carried.
    pub fn total_price_of(
        &self,
        item_names: impl IntoIterator<Item = impl AsRef<str>>,
    ) -> Option<Money> {
        let mut total = Money::ZERO;
        for name in item_names {
            total += self.menu_price(name.as_ref())?;
        }
        Some(total)
    }
}

/// A consumer's underlying request: desired items with target prices,
/// required amenities, a calibrated dollar value, and the rendered
/// natural-language request text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomerNeed {
    pub id: String,
    pub name: String,
    /// Item name -> target price. Deterministic ordering for stable files.
    pub desired_items: BTreeMap<String, Money>,
    pub required_amenities: BTreeSet<String>,
    pub value_cents: Money,
    pub nl_request: String,
}

impl CustomerNeed {
    pub fn validate(&self) -> Result<(), DomainError> {
        if !(1..=3).contains(&self.desired_items.len()) {
            return Err(DomainError::BadDesiredItemCount(self.desired_items.len()));
        }
        if !(1..=2).contains(&self.required_amenities.len()) {
            return Err(DomainError::BadAmenityCount(self.required_amenities.len()));
        }
        for (name, price) in &self.desired_items {
            if name.trim().is_empty() {
                return Err(DomainError::EmptyItemName);
            }
            if !price.is_positive() {
                return Err(DomainError::NonPositivePrice(*price));
            }
        }
        Ok(())
    }

    pub fn desired_item_names(&self) -> impl Iterator<Item = &str> {
        self.desired_items.keys().map(|s| s.as_str())
    }
}

/// One line of an order proposal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineItem {
    pub item_name: String,
    pub quantity: u32,
    pub unit_price_cents: Money,
}

/// A structured offer from a service agent to an assistant agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderProposal {
    pub proposal_id: String,
    pub from_agent: String,
    pub to_agent: String,
    pub line_items: Vec<LineItem>,
    pub total_price_cents: Money,
}

impl OrderProposal {
    /// Build a proposal whose total is derived from its line items.
    pub fn new(
        proposal_id: impl Into<String>,
        from_agent: impl Into<String>,
        to_agent: impl Into<String>,
        line_items: Vec<LineItem>,
    ) -> Result<Self, DomainError> {
        let proposal = OrderProposal {
            proposal_id: proposal_id.into(),
            from_agent: from_agent.into(),
            to_agent: to_agent.into(),
            total_price_cents: line_items
                .iter()
                .map(|li| li.unit_price_cents * i64::from(li.quantity))
                .sum(),
            line_items,
        };
        proposal.validate()?;
        Ok(proposal)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let mut seen = HashSet::new();
        let mut computed = Money::ZERO;
        for li in &self.line_items {
            if li.item_name.trim().is_empty() {
                return Err(DomainError::EmptyItemName);
            }
            if li.quantity == 0 {
                return Err(DomainError::ZeroQuantity);
            }
            if !li.unit_price_cents.is_positive() {
                return Err(DomainError::NonPositivePrice(li.unit_price_cents));
            }
            if !seen.insert(crate::economics::normalize_name(&li.item_name)) {
                return Err(DomainError::DuplicateItemName(li.item_name.clone()));
            }
            computed += li.unit_price_cents * i64::from(li.quantity);
        }
        if computed != self.total_price_cents {
            return Err(DomainError::TotalMismatch {
                declared: self.total_price_cents,
                computed,
            });
        }
        Ok(())
    }

    pub fn contains_item(&self, item_name: &str) -> bool {
        let wanted = crate::economics::normalize_name(item_name);
        self.line_items
            .iter()
            .any(|li| crate::economics::normalize_name(&li.item_name) == wanted)
    }
}

/// An immutable ledger entry referencing the proposal it settles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub transaction_id: String,
    pub proposal_id: String,
    pub payer: String,
    pub payee: String,
    pub amount_cents: Money,
    /// Monotonic ledger sequence number, assigned at append time.
    pub timestamp: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn li(name: &str, qty: u32, cents: i64) -> LineItem {
        LineItem {
            item_name: name.into(),
            quantity: qty,
            unit_price_cents: Money::from_cents(cents),
        }
    }

    #[test]
    fn proposal_total_is_derived_exactly() {
        let p = OrderProposal::new("p1", "b1", "c1", vec![li("Tacos", 2, 350), li("Agua", 1, 199)])
            .unwrap();
        assert_eq!(p.total_price_cents.cents(), 899);
    }

    #[test]
    fn proposal_rejects_total_mismatch() {
        let mut p = OrderProposal::new("p1", "b1", "c1", vec![li("Tacos", 1, 350)]).unwrap();
        p.total_price_cents = Money::from_cents(351);
        assert!(matches!(p.validate(), Err(DomainError::TotalMismatch { .. })));
    }

    #[test]
    fn proposal_rejects_duplicate_line_items() {
        let err = OrderProposal::new("p1", "b1", "c1", vec![li("Tacos", 1, 350), li("tacos", 1, 400)]);
        assert!(matches!(err, Err(DomainError::DuplicateItemName(_))));
    }

    #[test]
    fn proposal_rejects_zero_quantity() {
        let err = OrderProposal::new("p1", "b1", "c1", vec![li("Tacos", 0, 350)]);
        assert!(matches!(err, Err(DomainError::ZeroQuantity)));
    }

    #[test]
    fn menu_item_invariants() {
        assert!(MenuItem::new("", Money::from_cents(100)).is_err());
        assert!(MenuItem::new("Tacos", Money::ZERO).is_err());
        assert!(MenuItem::new("Tacos", Money::from_cents(-5)).is_err());
    }

    #[test]
    fn business_rejects_duplicate_menu_names() {
        let b = BusinessRecord {
            id: "b1".into(),
            name: "Casa".into(),
            description: String::new(),
            menu: vec![
                MenuItem::new("Tacos", Money::from_cents(100)).unwrap(),
                MenuItem::new("TACOS  ", Money::from_cents(200)).unwrap(),
            ],
            amenities: BTreeSet::new(),
        };
        assert!(b.validate().is_err());
    }

    #[test]
    fn need_cardinality_bounds() {
        let mut need = CustomerNeed {
            id: "c1".into(),
            name: "Alice".into(),
            desired_items: BTreeMap::new(),
            required_amenities: ["Live Music".to_string()].into_iter().collect(),
            value_cents: Money::from_cents(100),
            nl_request: String::new(),
        };
        assert!(matches!(need.validate(), Err(DomainError::BadDesiredItemCount(0))));
        need.desired_items.insert("Tacos".into(), Money::from_cents(100));
        assert!(need.validate().is_ok());
        for i in 0..3 {
            need.desired_items.insert(format!("Item {i}"), Money::from_cents(100));
        }
        assert!(matches!(need.validate(), Err(DomainError::BadDesiredItemCount(4))));
    }
}
