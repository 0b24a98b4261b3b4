//! Discovery layer: deterministic lexical ranking with pagination over menu
//! items, and the perfect-search oracle mode that returns the best-matching
//! businesses for a need.

use crate::domain::{BusinessRecord, CustomerNeed};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Lexical,
    Perfect,
}

/// Lexical scoring function. Plain token overlap is the default; BM25 is a
/// config option for experiments that want classic relevance weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Overlap,
    Bm25,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    /// Results per page in lexical mode.
    pub page_size: usize,
    /// Consideration-set cap: maximum results for a query. `None` leaves the
    /// ranked list uncapped (lexical pagination then walks all of it).
    pub result_limit: Option<usize>,
    pub weighting: Weighting,
}

impl SearchConfig {
    pub fn perfect() -> Self {
        SearchConfig {
            mode: SearchMode::Perfect,
            page_size: 10,
            result_limit: Some(3),
            weighting: Weighting::Overlap,
        }
    }

    pub fn lexical() -> Self {
        SearchConfig {
            mode: SearchMode::Lexical,
            page_size: 10,
            result_limit: None,
            weighting: Weighting::Overlap,
        }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig::lexical()
    }
}

/// Lowercase alphanumeric tokens; everything else separates.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// One searchable service listing.
#[derive(Debug, Clone)]
pub struct IndexEntry {
    /// Registered agent name, returned in search results.
    pub agent_name: String,
    /// Description given at registration, returned in search results.
    pub description: String,
    /// Bound business id, used only as the deterministic tie-break key.
    pub business_id: String,
    menu_tokens: BTreeMap<String, u32>,
    name_desc_tokens: BTreeSet<String>,
}

/// Immutable search index over registered services. The server swaps in a
/// fresh snapshot on registration; queries read a snapshot concurrently.
#[derive(Debug, Clone, Default)]
pub struct SearchIndex {
    entries: Vec<IndexEntry>,
}

impl SearchIndex {
    pub fn build<'a>(
        listings: impl IntoIterator<Item = (&'a str, &'a str, &'a BusinessRecord)>,
    ) -> Self {
        let mut entries: Vec<IndexEntry> = listings
            .into_iter()
            .map(|(agent_name, description, business)| {
                let mut menu_tokens = BTreeMap::new();
                for item in &business.menu {
                    for token in tokenize(&item.name) {
                        *menu_tokens.entry(token).or_insert(0) += 1;
                    }
                }
                let mut name_desc_tokens = BTreeSet::new();
                name_desc_tokens.extend(tokenize(agent_name));
                name_desc_tokens.extend(tokenize(description));
                IndexEntry {
                    agent_name: agent_name.to_string(),
                    description: description.to_string(),
                    business_id: business.id.clone(),
                    menu_tokens,
                    name_desc_tokens,
                }
            })
            .collect();
        entries.sort_by(|a, b| a.business_id.cmp(&b.business_id));
        SearchIndex { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rank every entry with a nonzero score for the query, best first.
    /// Deterministic: a fixed (index, query) pair always yields the same
    /// ordering, with ties broken by business id.
    fn rank(&self, query: &str, weighting: Weighting) -> Vec<&IndexEntry> {
        let query_tokens: BTreeSet<String> = tokenize(query).into_iter().collect();
        if query_tokens.is_empty() {
            return Vec::new();
        }
        match weighting {
            Weighting::Overlap => {
                // Integer score pair: menu overlap primary, name/description
                // overlap as the small tie-break weight.
                let mut scored: Vec<(usize, usize, &IndexEntry)> = self
                    .entries
                    .iter()
                    .filter_map(|entry| {
                        let menu_overlap = query_tokens
                            .iter()
                            .filter(|t| entry.menu_tokens.contains_key(*t))
                            .count();
                        let aux_overlap = query_tokens
                            .iter()
                            .filter(|t| entry.name_desc_tokens.contains(*t))
                            .count();
                        if menu_overlap + aux_overlap == 0 {
                            None
                        } else {
                            Some((menu_overlap, aux_overlap, entry))
                        }
                    })
                    .collect();
                scored.sort_by(|a, b| {
                    b.0.cmp(&a.0)
                        .then_with(|| b.1.cmp(&a.1))
                        .then_with(|| a.2.business_id.cmp(&b.2.business_id))
                });
                scored.into_iter().map(|(_, _, e)| e).collect()
            }
            Weighting::Bm25 => {
                let scores = self.bm25_scores(&query_tokens);
                let mut scored: Vec<(f64, &IndexEntry)> = self
                    .entries
                    .iter()
                    .zip(scores)
                    .filter(|(_, s)| *s > 0.0)
                    .map(|(e, s)| (s, e))
                    .collect();
                scored.sort_by(|a, b| {
                    b.0.partial_cmp(&a.0)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then_with(|| a.1.business_id.cmp(&b.1.business_id))
                });
                scored.into_iter().map(|(_, e)| e).collect()
            }
        }
    }

    fn bm25_scores(&self, query_tokens: &BTreeSet<String>) -> Vec<f64> {
        const K1: f64 = 1.2;
        const B: f64 = 0.75;
        let n = self.entries.len() as f64;
        let doc_lens: Vec<f64> = self
            .entries
            .iter()
            .map(|e| e.menu_tokens.values().map(|&c| c as f64).sum())
            .collect();
        let avg_len = if self.entries.is_empty() {
            1.0
        } else {
            (doc_lens.iter().sum::<f64>() / n).max(1.0)
        };
        self.entries
            .iter()
            .zip(&doc_lens)
            .map(|(entry, &dl)| {
                query_tokens
                    .iter()
                    .map(|t| {
                        let tf = f64::from(entry.menu_tokens.get(t).copied().unwrap_or(0));
                        if tf == 0.0 {
                            return 0.0;
                        }
                        let df = self
                            .entries
                            .iter()
                            .filter(|e| e.menu_tokens.contains_key(t))
                            .count() as f64;
                        let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
                        idf * tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * dl / avg_len))
                    })
                    .sum()
            })
            .collect()
    }

    /// Token-overlap search over menu items with pagination. Pages are
    /// 1-based; a page past the last match returns an empty list.
    pub fn lexical_search(
        &self,
        query: &str,
        page: usize,
        config: &SearchConfig,
    ) -> Vec<&IndexEntry> {
        let mut ranked = self.rank(query, config.weighting);
        if let Some(limit) = config.result_limit {
            ranked.truncate(limit);
        }
        let page = page.max(1);
        let start = (page - 1).saturating_mul(config.page_size);
        ranked
            .into_iter()
            .skip(start)
            .take(config.page_size)
            .collect()
    }
}

/// Parse a `page=N` directive out of the free-form constraints string.
/// Anything unparseable falls back to page 1.
pub fn parse_page_constraint(constraints: &str) -> usize {
    constraints
        .split(|c: char| c.is_whitespace() || c == '&' || c == ';' || c == ',')
        .find_map(|part| part.trim().strip_prefix("page="))
        .and_then(|n| n.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Oracle discovery: rank businesses for a need by (full fit on items and
/// amenities) first, then cheapest total desired-item price, then id, and
/// return the top `result_limit`. Businesses that do not carry all desired
/// items never appear; item-carrying businesses that miss amenities fill
/// remaining slots after the full fits.
pub fn perfect_search<'a>(
    need: &CustomerNeed,
    businesses: impl IntoIterator<Item = &'a BusinessRecord>,
    result_limit: usize,
) -> Vec<&'a BusinessRecord> {
    let mut candidates: Vec<(bool, crate::money::Money, &BusinessRecord)> = businesses
        .into_iter()
        .filter_map(|b| {
            let total = b.total_price_of(need.desired_item_names())?;
            let amenities_ok = {
                let offered: Vec<String> = b
                    .amenities
                    .iter()
                    .map(|a| crate::economics::normalize_name(a))
                    .collect();
                need.required_amenities
                    .iter()
                    .all(|req| offered.contains(&crate::economics::normalize_name(req)))
            };
            Some((amenities_ok, total, b))
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| a.2.id.cmp(&b.2.id))
    });
    candidates
        .into_iter()
        .take(result_limit)
        .map(|(_, _, b)| b)
        .collect()
}
