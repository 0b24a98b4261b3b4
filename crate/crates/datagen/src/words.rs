//! Seeded wordlists backing the template renderer: item names, amenity
//! vocabularies, customer names, and business name parts per domain.

use crate::config::Domain;

pub const RESTAURANT_ITEM_MODIFIERS: &[&str] = &[
    "Crispy", "Smoky", "Citrus", "Spicy", "Roasted", "Charred", "Honey", "Chipotle", "Tangy",
    "Creamy", "Garlic", "Zesty", "Ancho", "Verde", "Adobo", "Pineapple",
];

pub const RESTAURANT_ITEM_BASES: &[&str] = &[
    "Flautas", "Tacos", "Enchiladas", "Quesadilla", "Burrito", "Tamales", "Pozole", "Nachos",
    "Churro", "Tostada", "Fajita", "Torta", "Sopes", "Elote", "Ceviche", "Horchata", "Carnitas",
    "Barbacoa", "Empanada", "Taquitos",
];

pub const RESTAURANT_ITEM_FORMS: &[&str] = &[
    "Plate", "Bowl", "Combo", "Basket", "Platter", "Cup", "Duo", "Trio", "Skillet", "Stack",
];

pub const CONTRACTOR_SERVICE_SCOPES: &[&str] = &[
    "Interior", "Exterior", "Whole Home", "Emergency", "Seasonal", "Premium", "Standard",
    "Same Day", "Eco", "Custom", "Rapid", "Certified",
];

pub const CONTRACTOR_SERVICE_BASES: &[&str] = &[
    "Painting", "Plumbing", "Roofing", "Landscaping", "Drywall", "Tiling", "Gutter Cleaning",
    "Fence Repair", "Deck Staining", "HVAC Tune Up", "Window Installation", "Electrical Inspection",
    "Carpet Removal", "Pressure Washing", "Insulation Upgrade", "Masonry Repair",
];

pub const CONTRACTOR_SERVICE_FORMS: &[&str] = &[
    "Service", "Package", "Visit", "Project", "Session", "Overhaul", "Consultation", "Refresh",
];

/// Eight amenity labels per domain, seeded from the sample vocabulary.
pub const RESTAURANT_AMENITIES: &[&str] = &[
    "Outdoor Seating",
    "Live Music",
    "Onsite Parking",
    "Pet Friendly",
    "Wheelchair Accessible",
    "Delivery Available",
    "Late Night Hours",
    "Family Friendly",
];

pub const CONTRACTOR_ATTRIBUTES: &[&str] = &[
    "Background Checked Crew",
    "Multilingual Staff",
    "Licensed And Insured",
    "Free Estimates",
    "Emergency Availability",
    "Eco Friendly Materials",
    "Senior Discounts",
    "Satisfaction Guarantee",
];

pub const FIRST_NAMES: &[&str] = &[
    "Alice", "Marco", "Priya", "Jonah", "Mei", "Tomas", "Ingrid", "Kofi", "Lena", "Ravi", "Sofia",
    "Dmitri", "Aku", "Noor", "Felix", "Hana", "Omar", "Greta", "Luca", "Yuki", "Carmen", "Theo",
    "Nadia", "Bram", "Zoe",
];

pub const LAST_NAMES: &[&str] = &[
    "Babel", "Nguyen", "Okafor", "Lindqvist", "Marchetti", "Operman", "Castillo", "Duarte",
    "Haugen", "Iwata", "Jansen", "Kaplan", "Lindholm", "Moreau", "Novak", "Oliveira", "Petrov",
    "Quintana", "Rosales", "Santana", "Tanaka", "Ueda", "Vargas", "Weiss", "Zamora",
];

pub const RESTAURANT_NAME_PREFIXES: &[&str] = &[
    "Casa", "La Cocina", "El Patio", "Taqueria", "Cantina", "Hacienda", "Mercado", "Rancho",
    "Fonda", "Comedor", "Antojitos", "Sabores",
];

pub const RESTAURANT_NAME_CORES: &[&str] = &[
    "Sabor Mexicano", "del Sol", "Azteca", "de la Plaza", "Dos Hermanos", "Poblano", "Jalisco",
    "Luna Verde", "Maya", "Agave", "del Mar", "Mariposa", "Sol y Sombra", "Nopal", "Colibri",
    "Tres Flores",
];

pub const CONTRACTOR_NAME_PREFIXES: &[&str] = &[
    "Summit", "Cornerstone", "BlueLine", "Heritage", "Evergreen", "Anchor", "Beacon", "Granite",
    "Redwood", "Keystone", "Northstar", "Ironwood",
];

pub const CONTRACTOR_NAME_CORES: &[&str] = &[
    "Home Services", "Builders", "Contracting", "Craftworks", "Renovations", "Property Care",
    "Maintenance Co", "Construction Group", "Home Solutions", "Trade Works", "Repair Crew",
    "Improvements",
];

pub const RESTAURANT_DESCRIPTION_OPENERS: &[&str] = &[
    "Savor the vibrant flavors of modern Mexican and Tex-Mex cuisine",
    "Enjoy bold, slow-cooked classics and fresh salsas",
    "Experience street-food favorites elevated with a creative twist",
    "Taste time-honored family recipes with seasonal ingredients",
    "Discover smoky grilled specialties and handmade tortillas",
];

pub const RESTAURANT_DESCRIPTION_SETTINGS: &[&str] = &[
    "in a lively, welcoming space",
    "in a cozy neighborhood spot",
    "on a sunlit corner patio",
    "in a colorful, family-run dining room",
    "in a buzzing open-kitchen cantina",
];

pub const RESTAURANT_DESCRIPTION_CLOSERS: &[&str] = &[
    "Treat yourself to creative cocktails, fresh salsas, and savory classics crafted with a bold twist.",
    "Every plate comes with house-made sauces and a warm welcome.",
    "Our kitchen pairs tradition with a modern touch on every order.",
    "Expect generous portions and recipes passed down three generations.",
    "Regulars come for the salsa bar and stay for the dessert specials.",
];

pub const CONTRACTOR_DESCRIPTION_OPENERS: &[&str] = &[
    "Trusted local contractors delivering dependable workmanship",
    "A full-service crew handling projects big and small",
    "Experienced tradespeople focused on clean, on-time work",
    "Neighborhood specialists known for careful, durable results",
    "A family-run outfit with decades of combined field experience",
];

pub const CONTRACTOR_DESCRIPTION_SETTINGS: &[&str] = &[
    "for homes and small businesses",
    "across the metro area",
    "with transparent, itemized quotes",
    "backed by a written workmanship warranty",
    "with flexible scheduling year-round",
];

pub const CONTRACTOR_DESCRIPTION_CLOSERS: &[&str] = &[
    "We show up on time, protect your space, and leave the site spotless.",
    "Every job is scoped up front so there are no surprise charges.",
    "Our project leads walk you through each step before work begins.",
    "Materials are sourced to spec and installs are inspected twice.",
    "From the first call to the final walkthrough, we keep you informed.",
];

pub struct DomainWords {
    pub item_parts: (&'static [&'static str], &'static [&'static str], &'static [&'static str]),
    pub amenities: &'static [&'static str],
    pub business_name_parts: (&'static [&'static str], &'static [&'static str]),
    pub description_parts: (
        &'static [&'static str],
        &'static [&'static str],
        &'static [&'static str],
    ),
}

pub fn for_domain(domain: Domain) -> DomainWords {
    match domain {
        Domain::Restaurants => DomainWords {
            item_parts: (
                RESTAURANT_ITEM_MODIFIERS,
                RESTAURANT_ITEM_BASES,
                RESTAURANT_ITEM_FORMS,
            ),
            amenities: RESTAURANT_AMENITIES,
            business_name_parts: (RESTAURANT_NAME_PREFIXES, RESTAURANT_NAME_CORES),
            description_parts: (
                RESTAURANT_DESCRIPTION_OPENERS,
                RESTAURANT_DESCRIPTION_SETTINGS,
                RESTAURANT_DESCRIPTION_CLOSERS,
            ),
        },
        Domain::Contractors => DomainWords {
            item_parts: (
                CONTRACTOR_SERVICE_SCOPES,
                CONTRACTOR_SERVICE_BASES,
                CONTRACTOR_SERVICE_FORMS,
            ),
            amenities: CONTRACTOR_ATTRIBUTES,
            business_name_parts: (CONTRACTOR_NAME_PREFIXES, CONTRACTOR_NAME_CORES),
            description_parts: (
                CONTRACTOR_DESCRIPTION_OPENERS,
                CONTRACTOR_DESCRIPTION_SETTINGS,
                CONTRACTOR_DESCRIPTION_CLOSERS,
            ),
        },
    }
}
