//! The templated conversation conventions shared by the scripted assistant
//! and the rule-based service agents. Messages stay plain English so LLM
//! agents can join the same conversations; the parsers accept the template
//! exactly and fall back to catalog-based text scanning for anything else.

use agora_core::domain::BusinessRecord;
use agora_core::economics::normalize_name;
use std::collections::BTreeMap;

pub const DECLINE_MARKER: &str = "No proposal will be sent.";
pub const PROPOSAL_MARKER: &str = "An order proposal is on its way.";
const AMENITY_SECTION: &str = "Amenities -";

/// Assistant-side inquiry naming the desired items and amenities.
pub fn build_inquiry(items: &[String], amenities: &[String]) -> String {
    format!(
        "Hello! I would like to order: {}. Do you have these amenities: {}? \
         Please reply and send an order proposal.",
        items.join("; "),
        amenities.join("; "),
    )
}

#[derive(Debug, Default, PartialEq)]
pub struct Inquiry {
    /// Item names as asked (template order preserved).
    pub items: Vec<String>,
    pub amenities: Vec<String>,
}

/// Parse an inquiry. Structured template first; otherwise scan the text for
/// catalog item names and known amenity labels so free-form requests from
/// LLM assistants still get truthful answers.
pub fn parse_inquiry(text: &str, business: &BusinessRecord, amenity_vocabulary: &[String]) -> Inquiry {
    if let Some(parsed) = parse_structured_inquiry(text) {
        return parsed;
    }

    let haystack = normalize_name(text);
    let items = business
        .menu
        .iter()
        .filter(|item| haystack.contains(&normalize_name(&item.name)))
        .map(|item| item.name.clone())
        .collect();
    let mut amenities: Vec<String> = Vec::new();
    for label in amenity_vocabulary
        .iter()
        .map(|s| s.as_str())
        .chain(business.amenities.iter().map(|s| s.as_str()))
    {
        if haystack.contains(&normalize_name(label))
            && !amenities.iter().any(|a| normalize_name(a) == normalize_name(label))
        {
            amenities.push(label.to_string());
        }
    }
    Inquiry { items, amenities }
}

fn parse_structured_inquiry(text: &str) -> Option<Inquiry> {
    let after_order = text.split("order:").nth(1)?;
    let items_part = after_order.split('.').next()?;
    let after_amenities = text.split("amenities:").nth(1)?;
    let amenities_part = after_amenities.split('?').next()?;
    let split = |part: &str| -> Vec<String> {
        part.split(';')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    };
    let inquiry = Inquiry {
        items: split(items_part),
        amenities: split(amenities_part),
    };
    if inquiry.items.is_empty() {
        None
    } else {
        Some(inquiry)
    }
}

/// Truthful service reply: availability and menu price of every asked item,
/// a yes/no answer for every asked amenity (straight from the record), and
/// whether a proposal follows.
pub fn build_reply(business: &BusinessRecord, inquiry: &Inquiry) -> String {
    let mut available = Vec::new();
    let mut missing = Vec::new();
    for item in &inquiry.items {
        match business.menu_price(item) {
            Some(price) => available.push(format!("{item} ({price})")),
            None => missing.push(item.clone()),
        }
    }

    let mut reply = format!("Thanks for reaching out to {}!", business.name);
    if !available.is_empty() {
        reply.push_str(&format!(" Available: {}.", available.join("; ")));
    }
    if !missing.is_empty() {
        reply.push_str(&format!(" Not offered: {}.", missing.join("; ")));
    }
    if !inquiry.amenities.is_empty() {
        let answers: Vec<String> = inquiry
            .amenities
            .iter()
            .map(|asked| {
                let has = business
                    .amenities
                    .iter()
                    .any(|a| normalize_name(a) == normalize_name(asked));
                format!("{asked}: {}", if has { "yes" } else { "no" })
            })
            .collect();
        reply.push_str(&format!(" {AMENITY_SECTION} {}.", answers.join("; ")));
    }
    reply.push(' ');
    reply.push_str(if available.is_empty() { DECLINE_MARKER } else { PROPOSAL_MARKER });
    reply
}

/// Extract the amenity answers from a templated reply, keyed by normalized
/// amenity name.
pub fn parse_amenity_answers(reply: &str) -> BTreeMap<String, bool> {
    let mut answers = BTreeMap::new();
    let Some(section) = reply.split(AMENITY_SECTION).nth(1) else {
        return answers;
    };
    let Some(section) = section.split('.').next() else {
        return answers;
    };
    for pair in section.split(';') {
        if let Some((label, answer)) = pair.rsplit_once(':') {
            answers.insert(
                normalize_name(label),
                answer.trim().eq_ignore_ascii_case("yes"),
            );
        }
    }
    answers
}

pub fn is_decline(reply: &str) -> bool {
    reply.contains(DECLINE_MARKER)
}
