//! Text rendering for generated records. The default renderer is a
//! deterministic template engine; an external renderer (e.g. an LLM) can be
//! plugged in through the [`Renderer`] trait without touching the pipeline.

use crate::config::Domain;
use crate::words;
use rand::Rng;

pub trait Renderer {
    /// Natural-language request for a customer's desired items and amenities.
    fn render_request(&self, domain: Domain, items: &[String], amenities: &[String]) -> String;

    /// Flavor description for a business listing.
    fn render_business_description(
        &self,
        domain: Domain,
        business_name: &str,
        style_seed: (usize, usize, usize),
    ) -> String;
}

/// Deterministic, fully offline renderer.
#[derive(Debug, Default, Clone, Copy)]
pub struct TemplateRenderer;

fn join_with_and(parts: &[String]) -> String {
    match parts {
        [] => String::new(),
        [one] => one.clone(),
        [head @ .., last] => format!("{} and {}", head.join(", "), last),
    }
}

impl Renderer for TemplateRenderer {
    fn render_request(&self, domain: Domain, items: &[String], amenities: &[String]) -> String {
        let items_with_articles: Vec<String> =
            items.iter().map(|i| format!("a {i}")).collect();
        let item_phrase = join_with_and(&items_with_articles);
        let amenity_phrase = join_with_and(amenities);
        match domain {
            Domain::Restaurants => format!(
                "Could you find a business that offers {item_phrase} and has amenities like \
                 {amenity_phrase}? I would like to place an order at such an establishment."
            ),
            Domain::Contractors => format!(
                "Could you find a contractor that provides {item_phrase} and has service \
                 attributes like {amenity_phrase}? I would like to book such a provider."
            ),
        }
    }

    fn render_business_description(
        &self,
        domain: Domain,
        _business_name: &str,
        style_seed: (usize, usize, usize),
    ) -> String {
        let (openers, settings, closers) = words::for_domain(domain).description_parts;
        let opener = openers[style_seed.0 % openers.len()];
        let setting = settings[style_seed.1 % settings.len()];
        let closer = closers[style_seed.2 % closers.len()];
        format!("{opener} {setting}. {closer}")
    }
}

/// Draw a description style seed from the pipeline RNG so descriptions vary
/// across businesses but stay reproducible.
pub fn style_seed(rng: &mut impl Rng) -> (usize, usize, usize) {
    (rng.gen_range(0..64), rng.gen_range(0..64), rng.gen_range(0..64))
}
