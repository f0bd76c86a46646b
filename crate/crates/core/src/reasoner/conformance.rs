use std::collections::BTreeSet;

use crate::policy::{ActivationCondition, InputSpec, TagCategory, TagKey, UseMode};
use crate::rdf::Iri;

use super::{flat_map, ordered, KnowledgeBase, Pairing, ReasonerOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConflictKind {
    UnsatisfiedRequirement,
    UnmatchedExpectation,
    ProhibitedUse,
}

impl ConflictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConflictKind::UnsatisfiedRequirement => "UnsatisfiedRequirement",
            ConflictKind::UnmatchedExpectation => "UnmatchedExpectation",
            ConflictKind::ProhibitedUse => "ProhibitedUse",
        }
    }
}

/// One conflict tuple. Tag conflicts fill `category` and `descriptor`;
/// prohibited uses fill `mode`, `user`, `app_name` and `purpose` as far as
/// the matching context binds them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conflict {
    pub kind: ConflictKind,
    pub input_port: String,
    pub category: Option<TagCategory>,
    pub descriptor: Option<Iri>,
    pub mode: Option<UseMode>,
    pub user: Option<Iri>,
    pub app_name: Option<Iri>,
    pub purpose: Option<Iri>,
}

impl Conflict {
    fn tag(kind: ConflictKind, port: &str, key: TagKey) -> Self {
        Conflict {
            kind,
            input_port: port.to_owned(),
            category: Some(key.category),
            descriptor: Some(key.descriptor),
            mode: None,
            user: None,
            app_name: None,
            purpose: None,
        }
    }

    fn prohibited(port: &str, user: Option<Iri>, app_name: Option<Iri>, purpose: Option<Iri>) -> Self {
        Conflict {
            kind: ConflictKind::ProhibitedUse,
            input_port: port.to_owned(),
            category: None,
            descriptor: None,
            mode: Some(UseMode::Use),
            user,
            app_name,
            purpose,
        }
    }
}

/// All conflicts, sorted and without duplicates. Empty means the usage is
/// permitted (uncovered inputs are reported separately on the knowledge base).
pub fn check_conformance(kb: &KnowledgeBase, opts: &ReasonerOptions) -> Vec<Conflict> {
    let mut out: Vec<Conflict> = flat_map(&kb.pairings, opts, |p| pairing_conflicts(kb, *p, opts));
    out.sort();
    out.dedup();
    out
}

fn pairing_conflicts(kb: &KnowledgeBase, pairing: Pairing, opts: &ReasonerOptions) -> Vec<Conflict> {
    let input = &kb.app.inputs[pairing.input];
    let policy = &kb.data_policies[pairing.policy].policy;
    let port = input.port_name.as_str();
    let mut out = Vec::new();

    let tag_keys: BTreeSet<TagKey> = ordered(&policy.tags, opts).filter_map(|t| policy.tag_key(t)).collect();

    // Data → app: each requirement tag needs a matching capacity.
    for key in &tag_keys {
        if !key.category.is_requirement() {
            continue;
        }
        let satisfied = input.provides.iter().any(|prov| {
            prov.category == key.category
                && if opts.rdfs_closure {
                    kb.hierarchy.is_subclass(&prov.descriptor, &key.descriptor)
                } else {
                    prov.descriptor == key.descriptor
                }
        });
        if !satisfied {
            out.push(Conflict::tag(super::ConflictKind::UnsatisfiedRequirement, port, key.clone()));
        }
    }

    // App → data: each expectation (including intended purposes) needs a tag.
    for exp in input.all_expectations() {
        if !tag_keys.contains(&exp) {
            out.push(Conflict::tag(ConflictKind::UnmatchedExpectation, port, exp));
        }
    }

    for pr in ordered(&policy.prohibitions, opts) {
        for (u, n, p) in direct_matches(&pr.condition, &kb.context.user, &kb.app.name, input) {
            out.push(Conflict::prohibited(port, Some(u), Some(n), p));
        }
        for (u, n, p) in downstream_matches(&pr.condition, input) {
            out.push(Conflict::prohibited(port, u, Some(n), p));
        }
    }
    out
}

/// Bindings `(user, app, purpose)` under which a condition matches the
/// direct use of an input. Absent condition fields bind to the context
/// value; an input without purposes binds the purpose to `None`.
fn direct_matches(
    cond: &ActivationCondition,
    user: &Iri,
    app_name: &Iri,
    input: &InputSpec,
) -> Vec<(Iri, Iri, Option<Iri>)> {
    if cond.user.as_ref().is_some_and(|u| u != user) || cond.app_name.as_ref().is_some_and(|n| n != app_name) {
        return Vec::new();
    }
    let purposes: Vec<Option<Iri>> = match &cond.purpose {
        Some(p) if input.purposes.contains(p) => vec![Some(p.clone())],
        Some(_) => Vec::new(),
        None if input.purposes.is_empty() => vec![None],
        None => input.purposes.iter().cloned().map(Some).collect(),
    };
    purposes.into_iter().map(|p| (user.clone(), app_name.clone(), p)).collect()
}

/// Whether `direct_matches` would return any binding, without building them.
pub(crate) fn fires_directly(cond: &ActivationCondition, user: &Iri, app_name: &Iri, input: &InputSpec) -> bool {
    cond.user.as_ref().is_none_or(|u| u == user)
        && cond.app_name.as_ref().is_none_or(|n| n == app_name)
        && cond.purpose.as_ref().is_none_or(|p| input.purposes.contains(p))
}

/// Bindings through the input's downstreams. The downstream path does not
/// constrain the user, so it is reported as the condition states it.
fn downstream_matches(cond: &ActivationCondition, input: &InputSpec) -> Vec<(Option<Iri>, Iri, Option<Iri>)> {
    let mut out = Vec::new();
    for ds in &input.downstreams {
        if cond.app_name.as_ref().is_some_and(|n| *n != ds.app_name) {
            continue;
        }
        let purpose = match (&cond.purpose, &ds.purpose) {
            (Some(p), Some(q)) if p == q => Some(p.clone()),
            (Some(_), _) => continue,
            (None, q) => q.clone(),
        };
        out.push((cond.user.clone(), ds.app_name.clone(), purpose));
    }
    out
}
