//! The economic model: all-or-nothing fit, calibrated value, and the
//! utility / consumer-welfare computations.
//!
//! Utility is `value x fit - price` with fit in {0, 1}. A transaction fits
//! only when every desired item appears in the proposal and every required
//! amenity is in the business's amenity set; there is no partial credit.

use crate::domain::{BusinessRecord, CustomerNeed, DomainError, ItemSpec, OrderProposal};
use crate::money::Money;

/// Canonical form used for all item and amenity name comparisons:
/// lowercase with runs of whitespace collapsed to single spaces.
pub fn normalize_name(name: &str) -> String {
    name.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// All-or-nothing fit predicate. True iff the proposal covers every desired
/// item of the need and the business offers every required amenity. Extra
/// line items in the proposal do not break fit.
pub fn compute_fit(need: &CustomerNeed, proposal: &OrderProposal, business: &BusinessRecord) -> bool {
    let items_ok = need
        .desired_item_names()
        .all(|item| proposal.contains_item(item));
    if !items_ok {
        return false;
    }
    let offered: Vec<String> = business.amenities.iter().map(|a| normalize_name(a)).collect();
    need.required_amenities
        .iter()
        .all(|req| offered.contains(&normalize_name(req)))
}

/// Calibrated value of satisfying a need: `alpha` times the total of the
/// desired items' universe mean prices. Kept as the single swappable point
/// if a per-item mean-of-means calibration is ever wanted instead.
pub fn compute_value<'a>(
    desired_item_names: impl IntoIterator<Item = &'a str>,
    universe: &[ItemSpec],
    alpha: f64,
) -> Result<Money, DomainError> {
    let mut total_mean = Money::ZERO;
    for name in desired_item_names {
        let wanted = normalize_name(name);
        let spec = universe
            .iter()
            .find(|s| normalize_name(&s.name) == wanted)
            .ok_or_else(|| DomainError::UnknownItem(name.to_string()))?;
        total_mean += spec.mean_price_cents;
    }
    Ok(total_mean.scale(alpha))
}

/// Signed consumer utility of a single transaction per the market's
/// utility equation. Negative when the customer pays for a non-fitting
/// or overpriced order.
pub fn compute_utility(
    need: &CustomerNeed,
    proposal: &OrderProposal,
    business: &BusinessRecord,
) -> Money {
    let fit = compute_fit(need, proposal, business);
    let value = if fit { need.value_cents } else { Money::ZERO };
    value - proposal.total_price_cents
}

/// Total consumer welfare over completed transactions. Customers with no
/// transaction simply do not appear in the list and contribute zero.
pub fn consumer_welfare<'a>(
    transactions: impl IntoIterator<Item = (&'a CustomerNeed, &'a OrderProposal, &'a BusinessRecord)>,
) -> Money {
    transactions
        .into_iter()
        .map(|(need, proposal, business)| compute_utility(need, proposal, business))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{LineItem, MenuItem};
    use std::collections::{BTreeMap, BTreeSet};

    fn need(items: &[(&str, i64)], amenities: &[&str], value: i64) -> CustomerNeed {
        CustomerNeed {
            id: "c1".into(),
            name: "Alice Babel".into(),
            desired_items: items
                .iter()
                .map(|(n, p)| (n.to_string(), Money::from_cents(*p)))
                .collect::<BTreeMap<_, _>>(),
            required_amenities: amenities.iter().map(|a| a.to_string()).collect(),
            value_cents: Money::from_cents(value),
            nl_request: String::new(),
        }
    }

    fn business(amenities: &[&str]) -> BusinessRecord {
        BusinessRecord {
            id: "b1".into(),
            name: "Casa Sabor Mexicano".into(),
            description: String::new(),
            menu: vec![MenuItem::new("Crispy Flautas Plate", Money::from_cents(1099)).unwrap()],
            amenities: amenities.iter().map(|a| a.to_string()).collect::<BTreeSet<_>>(),
        }
    }

    fn proposal(items: &[(&str, i64)]) -> OrderProposal {
        OrderProposal::new(
            "p1",
            "b1",
            "c1",
            items
                .iter()
                .map(|(n, p)| LineItem {
                    item_name: n.to_string(),
                    quantity: 1,
                    unit_price_cents: Money::from_cents(*p),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn fit_holds_when_items_and_amenities_covered() {
        let n = need(
            &[("Crispy Flautas Plate", 1099)],
            &["Outdoor Seating", "Live Music"],
            2198,
        );
        let p = proposal(&[("Crispy Flautas Plate", 1099)]);
        assert!(compute_fit(&n, &p, &business(&["Outdoor Seating", "Live Music"])));
    }

    #[test]
    fn one_missing_amenity_breaks_fit() {
        let n = need(
            &[("Crispy Flautas Plate", 1099)],
            &["Outdoor Seating", "Live Music"],
            2198,
        );
        let p = proposal(&[("Crispy Flautas Plate", 1099)]);
        assert!(!compute_fit(&n, &p, &business(&["Outdoor Seating"])));
    }

    #[test]
    fn missing_item_breaks_fit() {
        let n = need(&[("Tacos", 300), ("Agua Fresca", 250)], &["Live Music"], 1100);
        let p = proposal(&[("Tacos", 300)]);
        assert!(!compute_fit(&n, &p, &business(&["Live Music"])));
    }

    #[test]
    fn extra_items_do_not_break_fit() {
        let n = need(&[("Tacos", 300)], &["Live Music"], 600);
        let p = proposal(&[("Tacos", 300), ("Churros", 450)]);
        assert!(compute_fit(&n, &p, &business(&["Live Music", "Onsite Parking"])));
    }

    #[test]
    fn name_matching_is_case_and_whitespace_insensitive() {
        let n = need(&[("  crispy   FLAUTAS plate ", 1099)], &["live  MUSIC"], 2198);
        let p = proposal(&[("Crispy Flautas Plate", 1099)]);
        assert!(compute_fit(&n, &p, &business(&["Live Music"])));
    }

    #[test]
    fn value_scales_item_means() {
        let universe = vec![
            ItemSpec {
                name: "A".into(),
                mean_price_cents: Money::from_cents(1000),
                price_stddev_cents: Money::ZERO,
                desirable: true,
            },
            ItemSpec {
                name: "B".into(),
                mean_price_cents: Money::from_cents(600),
                price_stddev_cents: Money::ZERO,
                desirable: true,
            },
            ItemSpec {
                name: "Horchata Latte".into(),
                mean_price_cents: Money::from_cents(559),
                price_stddev_cents: Money::ZERO,
                desirable: true,
            },
        ];
        assert_eq!(compute_value(["A"], &universe, 2.0).unwrap().cents(), 2000);
        assert_eq!(compute_value(["A", "B"], &universe, 2.0).unwrap().cents(), 3200);
        assert_eq!(
            compute_value(["Horchata Latte"], &universe, 1.0).unwrap().cents(),
            559
        );
        assert!(matches!(
            compute_value(["Nope"], &universe, 2.0),
            Err(DomainError::UnknownItem(_))
        ));
    }

    #[test]
    fn utility_follows_value_times_fit_minus_price() {
        let n = need(&[("Crispy Flautas Plate", 1099)], &["Live Music"], 2000);
        let p = proposal(&[("Crispy Flautas Plate", 1200)]);
        assert_eq!(compute_utility(&n, &p, &business(&["Live Music"])).cents(), 800);
        assert_eq!(compute_utility(&n, &p, &business(&[])).cents(), -1200);

        let n_even = need(&[("Crispy Flautas Plate", 1099)], &["Live Music"], 2198);
        let p_even = proposal(&[("Crispy Flautas Plate", 2198)]);
        assert_eq!(
            compute_utility(&n_even, &p_even, &business(&["Live Music"])).cents(),
            0
        );
    }

    #[test]
    fn welfare_sums_utilities() {
        assert_eq!(consumer_welfare(std::iter::empty()), Money::ZERO);

        let n1 = need(&[("Crispy Flautas Plate", 1099)], &["Live Music"], 2000);
        let p1 = proposal(&[("Crispy Flautas Plate", 1200)]);
        let b1 = business(&["Live Music"]);
        let b2 = business(&[]);
        let welfare = consumer_welfare([(&n1, &p1, &b1), (&n1, &p1, &b2)]);
        assert_eq!(welfare.cents(), 800 - 1200);
    }
}
