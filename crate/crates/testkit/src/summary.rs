//! Comparable, id-free forms of reasoning results.
//!
//! Terms are rendered with their `Debug` form so IRIs, blank nodes and typed
//! literals stay distinct. Derived nodes are identified by the input node
//! they came from rather than by their generated id.

use std::collections::{BTreeMap, BTreeSet};

use dtou_core::reasoner::{ActivatedObligation, Conflict, DerivedPolicy};
use dtou_core::{Term, Vocab};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConflictTuple {
    pub kind: &'static str,
    pub port: String,
    pub category: Option<String>,
    pub descriptor: Option<String>,
    pub user: Option<String>,
    pub app_name: Option<String>,
    pub purpose: Option<String>,
}

impl ConflictTuple {
    pub fn tag(kind: &'static str, port: &str, category: String, descriptor: String) -> Self {
        ConflictTuple {
            kind,
            port: port.to_owned(),
            category: Some(category),
            descriptor: Some(descriptor),
            user: None,
            app_name: None,
            purpose: None,
        }
    }

    pub fn prohibited(port: &str, user: Option<String>, app_name: Option<String>, purpose: Option<String>) -> Self {
        ConflictTuple {
            kind: "ProhibitedUse",
            port: port.to_owned(),
            category: None,
            descriptor: None,
            user,
            app_name,
            purpose,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ObligationTuple {
    pub class: String,
    /// `(name, class, value)` per argument, in order.
    pub args: Vec<(String, String, String)>,
    pub port: String,
}

/// An input node as seen through one input port and one policy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OriginKey {
    pub input_port: String,
    pub policy: String,
    pub node: String,
}

pub type ConditionKey = (Option<String>, Option<String>, Option<String>);

/// Multisets of derived terms keyed by origin.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivedSummary {
    /// `(origin, name, class, value)`.
    pub attributes: BTreeSet<(OriginKey, String, String, String)>,
    /// `(category, attribute_ref origin, binding origins)`.
    pub tags: Vec<(String, OriginKey, BTreeSet<OriginKey>)>,
    /// `(condition, binding origins)`.
    pub prohibitions: Vec<(ConditionKey, BTreeSet<OriginKey>)>,
    /// `(class, arg origins, condition, binding origins)`.
    pub obligations: Vec<(String, Vec<OriginKey>, ConditionKey, BTreeSet<OriginKey>)>,
}

impl DerivedSummary {
    pub fn normalise(&mut self) {
        self.tags.sort();
        self.prohibitions.sort();
        self.obligations.sort();
    }

    pub fn term_count(&self) -> usize {
        self.attributes.len() + self.tags.len() + self.prohibitions.len() + self.obligations.len()
    }
}

fn key(t: &Term) -> String {
    format!("{t:?}")
}

pub fn conflicts(found: &[Conflict], vocab: &Vocab) -> BTreeSet<ConflictTuple> {
    let iri = |i: &Option<dtou_core::Iri>| i.as_ref().map(|i| key(&Term::Iri(i.clone())));
    found
        .iter()
        .map(|c| ConflictTuple {
            kind: c.kind.as_str(),
            port: c.input_port.clone(),
            category: c.category.as_ref().map(|cat| key(&Term::Iri(cat.iri(vocab)))),
            descriptor: iri(&c.descriptor),
            user: iri(&c.user),
            app_name: iri(&c.app_name),
            purpose: iri(&c.purpose),
        })
        .collect()
}

pub fn obligations(found: &[ActivatedObligation]) -> BTreeSet<ObligationTuple> {
    found
        .iter()
        .map(|o| ObligationTuple {
            class: key(&Term::Iri(o.obligation_class.clone())),
            args: o
                .arg_values
                .iter()
                .map(|a| (key(&Term::Iri(a.name.clone())), key(&Term::Iri(a.class.clone())), key(&a.value)))
                .collect(),
            port: o.input_port.clone(),
        })
        .collect()
}

pub fn derived(policies: &[DerivedPolicy], vocab: &Vocab) -> BTreeMap<String, DerivedSummary> {
    policies.iter().map(|d| (d.output_port.clone(), derived_one(d, vocab))).collect()
}

pub fn derived_one(d: &DerivedPolicy, vocab: &Vocab) -> DerivedSummary {
    let origins: BTreeMap<&Term, OriginKey> = d
        .links
        .iter()
        .map(|l| {
            (&l.target, OriginKey { input_port: l.input_port.clone(), policy: key(&l.origin_policy), node: key(&l.origin) })
        })
        .collect();
    let origin = |t: &Term| origins.get(t).cloned().unwrap_or_else(|| panic!("no forward link to {t:?}"));
    let condition = |c: &dtou_core::policy::ActivationCondition| -> ConditionKey {
        let f = |i: &Option<dtou_core::Iri>| i.as_ref().map(|i| key(&Term::Iri(i.clone())));
        (f(&c.user), f(&c.app_name), f(&c.purpose))
    };
    let p = &d.policy;
    let mut s = DerivedSummary {
        attributes: p
            .attributes
            .values()
            .map(|a| (origin(&a.id), key(&Term::Iri(a.name.clone())), key(&Term::Iri(a.class.clone())), key(&a.value)))
            .collect(),
        tags: p
            .tags
            .iter()
            .map(|t| {
                (key(&Term::Iri(t.category.iri(vocab))), origin(&t.attribute_ref), t.validity_bindings.iter().map(origin).collect())
            })
            .collect(),
        prohibitions: p
            .prohibitions
            .iter()
            .map(|pr| (condition(&pr.condition), pr.validity_bindings.iter().map(origin).collect()))
            .collect(),
        obligations: p
            .obligations
            .iter()
            .map(|ob| {
                (
                    key(&Term::Iri(ob.obligation_class.clone())),
                    ob.args.iter().map(origin).collect(),
                    condition(&ob.condition),
                    ob.validity_bindings.iter().map(origin).collect(),
                )
            })
            .collect(),
    };
    s.normalise();
    s
}

/// `(name, class, value)` of an attribute.
pub type AttrKey = (String, String, String);

/// A data policy with every node id replaced by the content it names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPolicy {
    pub uri: String,
    pub attributes: Vec<AttrKey>,
    pub tags: Vec<(String, AttrKey, Vec<AttrKey>)>,
    pub prohibitions: Vec<(ConditionKey, Vec<AttrKey>)>,
    pub obligations: Vec<(String, Vec<AttrKey>, ConditionKey, Vec<AttrKey>)>,
}

impl CanonicalPolicy {
    pub fn term_count(&self) -> usize {
        self.attributes.len() + self.tags.len() + self.prohibitions.len() + self.obligations.len()
    }

    /// Semantic-layer terms as one sorted list of strings.
    pub fn semantic_terms(&self) -> Vec<String> {
        let mut out: Vec<String> = self.tags.iter().map(|t| format!("tag {t:?}")).collect();
        out.extend(self.prohibitions.iter().map(|p| format!("prohibition {p:?}")));
        out.extend(self.obligations.iter().map(|o| format!("obligation {o:?}")));
        out.sort();
        out
    }
}

pub fn canonical(set: &dtou_core::policy::DataPolicySet, vocab: &Vocab) -> CanonicalPolicy {
    let p = &set.policy;
    let attr = |id: &Term| -> AttrKey {
        let a = p.attribute(id).unwrap_or_else(|| panic!("dangling {id:?}"));
        (key(&Term::Iri(a.name.clone())), key(&Term::Iri(a.class.clone())), key(&a.value))
    };
    let set_of = |ids: &BTreeSet<Term>| -> Vec<AttrKey> {
        let mut v: Vec<AttrKey> = ids.iter().map(attr).collect();
        v.sort();
        v
    };
    let condition = |c: &dtou_core::policy::ActivationCondition| -> ConditionKey {
        let f = |i: &Option<dtou_core::Iri>| i.as_ref().map(|i| key(&Term::Iri(i.clone())));
        (f(&c.user), f(&c.app_name), f(&c.purpose))
    };
    let mut c = CanonicalPolicy {
        uri: set.uri.to_string(),
        attributes: p.attributes.keys().map(attr).collect(),
        tags: p
            .tags
            .iter()
            .map(|t| (key(&Term::Iri(t.category.iri(vocab))), attr(&t.attribute_ref), set_of(&t.validity_bindings)))
            .collect(),
        prohibitions: p.prohibitions.iter().map(|pr| (condition(&pr.condition), set_of(&pr.validity_bindings))).collect(),
        obligations: p
            .obligations
            .iter()
            .map(|ob| {
                (
                    key(&Term::Iri(ob.obligation_class.clone())),
                    ob.args.iter().map(attr).collect(),
                    condition(&ob.condition),
                    set_of(&ob.validity_bindings),
                )
            })
            .collect(),
    };
    c.attributes.sort();
    c.tags.sort();
    c.prohibitions.sort();
    c.obligations.sort();
    c
}
