//! The worked-example documents, embedded at compile time.

use dtou_core::{parse_turtle, Graph};

macro_rules! fixture {
    ($($name:ident => $file:literal),* $(,)?) => {
        $(pub const $name: &str = include_str!(concat!("../../../fixtures/", $file));)*
    };
}

fixture! {
    PAYMENT_INFO => "payment-info.ttl",
    SHOE_SIZE => "shoe-size.ttl",
    ADDRESS => "address.ttl",
    HAPPY_SHOP => "happy-shop.ttl",
    USAGE_CONTEXT => "usage-context.ttl",
    RESEARCH_APP => "research-app.ttl",
    RESEARCH_CONTEXT => "research-context.ttl",
}

/// The original snippets, `(file name, text)`.
pub const LISTINGS: &[(&str, &str)] = &[
    ("attribute.ttl", include_str!("../../../fixtures/listings/attribute.ttl")),
    ("security-tag.ttl", include_str!("../../../fixtures/listings/security-tag.ttl")),
    ("prohibition.ttl", include_str!("../../../fixtures/listings/prohibition.ttl")),
    ("obligation.ttl", include_str!("../../../fixtures/listings/obligation.ttl")),
    ("payment-policy-set.ttl", include_str!("../../../fixtures/listings/payment-policy-set.ttl")),
    ("input-spec.ttl", include_str!("../../../fixtures/listings/input-spec.ttl")),
    ("output-spec.ttl", include_str!("../../../fixtures/listings/output-spec.ttl")),
    ("payment-info-terms.ttl", include_str!("../../../fixtures/listings/payment-info-terms.ttl")),
    ("shoe-size-set.ttl", include_str!("../../../fixtures/listings/shoe-size-set.ttl")),
    ("app-policy-set.ttl", include_str!("../../../fixtures/listings/app-policy-set.ttl")),
    ("usage-context.ttl", include_str!("../../../fixtures/listings/usage-context.ttl")),
];

/// Every combined document, `(name, text)`.
pub const DOCUMENTS: &[(&str, &str)] = &[
    ("payment-info", PAYMENT_INFO),
    ("shoe-size", SHOE_SIZE),
    ("address", ADDRESS),
    ("happy-shop", HAPPY_SHOP),
    ("usage-context", USAGE_CONTEXT),
    ("research-app", RESEARCH_APP),
    ("research-context", RESEARCH_CONTEXT),
];

pub fn graph(text: &str) -> Graph {
    parse_turtle(text, None).expect("fixture parses")
}

/// Alice's three data policies.
pub fn data_graphs() -> Vec<Graph> {
    [PAYMENT_INFO, SHOE_SIZE, ADDRESS].iter().map(|t| graph(t)).collect()
}

/// Absolute IRI of a name in the default vocabulary namespace.
pub fn v(local: &str) -> String {
    format!("{}{local}", dtou_core::vocab::DEFAULT_NAMESPACE)
}
