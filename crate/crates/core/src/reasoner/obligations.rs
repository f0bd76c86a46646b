use crate::rdf::{Iri, Term};

use super::conformance::fires_directly;
use super::{flat_map, ordered, KnowledgeBase, ReasonerOptions};

/// An argument attribute resolved to its fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArgValue {
    pub name: Iri,
    pub class: Iri,
    pub value: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivatedObligation {
    pub obligation_class: Iri,
    /// In argument-list order.
    pub arg_values: Vec<ArgValue>,
    pub input_port: String,
}

/// Obligations whose condition matches the direct use of a paired input.
/// Downstreams never activate obligations.
pub fn check_obligations(kb: &KnowledgeBase, opts: &ReasonerOptions) -> Vec<ActivatedObligation> {
    let mut out = flat_map(&kb.pairings, opts, |pairing| {
        let input = &kb.app.inputs[pairing.input];
        let policy = &kb.data_policies[pairing.policy].policy;
        ordered(&policy.obligations, opts)
            .filter(|ob| fires_directly(&ob.condition, &kb.context.user, &kb.app.name, input))
            .map(|ob| ActivatedObligation {
                obligation_class: ob.obligation_class.clone(),
                arg_values: ob
                    .args
                    .iter()
                    .filter_map(|a| policy.attribute(a))
                    .map(|a| ArgValue { name: a.name.clone(), class: a.class.clone(), value: a.value.clone() })
                    .collect(),
                input_port: input.port_name.clone(),
            })
            .collect()
    });
    out.sort();
    out.dedup();
    out
}
