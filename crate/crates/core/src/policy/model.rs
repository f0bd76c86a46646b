use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use crate::rdf::{Iri, Literal, Term};
use crate::vocab::Vocab;

/// A `(name, class, value)` tuple in the base layer of a data policy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub id: Term,
    pub name: Iri,
    pub class: Iri,
    /// An IRI (including the `:nil` sentinel) or a literal.
    pub value: Term,
}

/// Tag category. Unknown categories are kept verbatim and matched by equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TagCategory {
    Security,
    Integrity,
    Purpose,
    Other(Iri),
}

impl TagCategory {
    pub fn iri(&self, vocab: &Vocab) -> Iri {
        match self {
            TagCategory::Security => vocab.security.clone(),
            TagCategory::Integrity => vocab.integrity.clone(),
            TagCategory::Purpose => vocab.purpose_category.clone(),
            TagCategory::Other(iri) => iri.clone(),
        }
    }

    pub fn from_iri(iri: &Iri, vocab: &Vocab) -> Self {
        if *iri == vocab.security {
            TagCategory::Security
        } else if *iri == vocab.integrity {
            TagCategory::Integrity
        } else if *iri == vocab.purpose_category {
            TagCategory::Purpose
        } else {
            TagCategory::Other(iri.clone())
        }
    }

    /// Requirement categories are checked data → app (the app must provide them).
    pub fn is_requirement(&self) -> bool {
        matches!(self, TagCategory::Security | TagCategory::Other(_))
    }
}

impl fmt::Display for TagCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TagCategory::Security => f.write_str("Security"),
            TagCategory::Integrity => f.write_str("Integrity"),
            TagCategory::Purpose => f.write_str("Purpose"),
            TagCategory::Other(iri) => f.write_str(iri.as_str()),
        }
    }
}

/// A `(category, descriptor)` pair, as carried by tags and input capacities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TagKey {
    pub category: TagCategory,
    pub descriptor: Iri,
}

impl TagKey {
    pub fn new(category: TagCategory, descriptor: Iri) -> Self {
        TagKey { category, descriptor }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tag {
    pub id: Term,
    pub category: TagCategory,
    /// The attribute whose class is this tag's descriptor.
    pub attribute_ref: Term,
    pub validity_bindings: BTreeSet<Term>,
}

/// Matcher against the usage context. `None` fields match any value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ActivationCondition {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user: Option<Iri>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub app_name: Option<Iri>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purpose: Option<Iri>,
}

impl ActivationCondition {
    pub fn is_empty(&self) -> bool {
        self.user.is_none() && self.app_name.is_none() && self.purpose.is_none()
    }
}

/// Only the `Use` mode exists.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum UseMode {
    #[default]
    Use,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prohibition {
    pub id: Term,
    pub mode: UseMode,
    pub condition: ActivationCondition,
    pub validity_bindings: BTreeSet<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub id: Term,
    pub obligation_class: Iri,
    /// Attribute ids, in collection order.
    pub args: Vec<Term>,
    pub condition: ActivationCondition,
    pub validity_bindings: BTreeSet<Term>,
}

/// The terms of one data policy. Attributes are keyed by node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub id: Term,
    pub attributes: IndexMap<Term, Attribute>,
    pub tags: Vec<Tag>,
    pub prohibitions: Vec<Prohibition>,
    pub obligations: Vec<Obligation>,
}

impl Policy {
    pub fn attribute(&self, id: &Term) -> Option<&Attribute> {
        self.attributes.get(id)
    }

    /// The descriptor of a tag: the class of its referenced attribute.
    pub fn descriptor(&self, tag: &Tag) -> Option<&Iri> {
        self.attribute(&tag.attribute_ref).map(|a| &a.class)
    }

    pub fn tag_key(&self, tag: &Tag) -> Option<TagKey> {
        self.descriptor(tag).map(|d| TagKey::new(tag.category.clone(), d.clone()))
    }

    pub fn term_count(&self) -> usize {
        self.attributes.len() + self.tags.len() + self.prohibitions.len() + self.obligations.len()
    }
}

/// A data IRI paired with the policy governing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataPolicySet {
    pub data_node: Term,
    pub uri: Iri,
    pub policy: Policy,
}

/// An external consumer the app forwards an input to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Downstream {
    pub app_name: Iri,
    pub user: Option<Iri>,
    pub purpose: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpec {
    pub id: Term,
    pub port_name: String,
    pub data_uri: Iri,
    /// Capacities the app complies with (Security, or custom categories).
    pub provides: BTreeSet<TagKey>,
    /// Tags the app expects the data to carry (Integrity, or custom categories).
    pub expects: BTreeSet<TagKey>,
    /// Intended uses; checked against the data's Purpose tags.
    pub purposes: BTreeSet<Iri>,
    pub downstreams: Vec<Downstream>,
}

impl InputSpec {
    /// Every expectation including purposes, as `(category, descriptor)` pairs.
    pub fn all_expectations(&self) -> impl Iterator<Item = TagKey> + '_ {
        self.expects
            .iter()
            .cloned()
            .chain(self.purposes.iter().map(|p| TagKey::new(TagCategory::Purpose, p.clone())))
    }
}

/// Attribute matcher of a refinement. `None` fields are wildcards; an absent
/// `input_port` applies the filter to every input of the output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Filter {
    pub input_port: Option<String>,
    pub name: Option<Iri>,
    pub class: Option<Iri>,
    pub value: Option<Term>,
}

impl Filter {
    pub fn is_empty(&self) -> bool {
        self.input_port.is_none() && self.name.is_none() && self.class.is_none() && self.value.is_none()
    }

    pub fn matches(&self, port: &str, attr: &Attribute) -> bool {
        self.input_port.as_deref().is_none_or(|p| p == port)
            && self.name.as_ref().is_none_or(|n| *n == attr.name)
            && self.class.as_ref().is_none_or(|c| *c == attr.class)
            && self.value.as_ref().is_none_or(|v| *v == attr.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefinementKind {
    Delete,
    Edit { new_class: Iri, new_value: Term },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub id: Term,
    pub kind: RefinementKind,
    pub filter: Filter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputSpec {
    pub id: Term,
    pub port_name: String,
    /// Input port names, sorted and distinct.
    pub from_ports: Vec<String>,
    pub refinements: Vec<Refinement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppPolicy {
    pub id: Term,
    pub name: Iri,
    pub inputs: Vec<InputSpec>,
    pub outputs: Vec<OutputSpec>,
}

impl AppPolicy {
    pub fn input(&self, port: &str) -> Option<&InputSpec> {
        self.inputs.iter().find(|i| i.port_name == port)
    }

    pub fn output(&self, port: &str) -> Option<&OutputSpec> {
        self.outputs.iter().find(|o| o.port_name == port)
    }
}

/// Who is using which app, and when. The time is carried but not evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageContext {
    pub id: Term,
    pub user: Iri,
    /// Node id of the app policy this context refers to.
    pub app_policy: Term,
    pub time: Literal,
}
