use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use sha2::{Digest, Sha256};

use crate::policy::{
    Attribute, DataPolicySet, Obligation, OutputSpec, Policy, Prohibition, RefinementKind, Tag,
};
use crate::rdf::{Iri, Term};

use super::{flat_map, ordered, KnowledgeBase, ReasonError, ReasonerOptions};

/// Records that `origin` (an attribute of the policy `origin_policy` read
/// through `input_port`) survives at output `port` as `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForwardLink {
    pub origin: Term,
    pub input_port: String,
    pub origin_policy: Term,
    pub port: String,
    pub target: Term,
}

/// The policy of one output port, not yet bound to a data uri.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedPolicy {
    pub output_port: String,
    pub data_node: Term,
    pub policy: Policy,
    pub links: Vec<ForwardLink>,
}

impl DerivedPolicy {
    pub fn to_data_policy(&self, uri: Iri) -> DataPolicySet {
        DataPolicySet { data_node: self.data_node.clone(), uri, policy: self.policy.clone() }
    }
}

/// One derived policy per output spec, in app order.
pub fn derive_policies(kb: &KnowledgeBase, opts: &ReasonerOptions) -> Result<Vec<DerivedPolicy>, ReasonError> {
    kb.app.outputs.iter().map(|o| derive_output(kb, o, opts)).collect()
}

pub fn derive_policy(kb: &KnowledgeBase, output_port: &str, opts: &ReasonerOptions) -> Result<DerivedPolicy, ReasonError> {
    let output = kb.app.output(output_port).ok_or_else(|| ReasonError::UnknownOutput(output_port.to_owned()))?;
    derive_output(kb, output, opts)
}

struct Source<'a> {
    input_port: &'a str,
    /// Names the policy in derived ids independently of load order.
    key: String,
    policy: &'a Policy,
}

#[derive(Default)]
struct Part {
    attributes: Vec<Attribute>,
    links: Vec<ForwardLink>,
    tags: Vec<Tag>,
    prohibitions: Vec<Prohibition>,
    obligations: Vec<Obligation>,
}

fn derive_output(kb: &KnowledgeBase, output: &OutputSpec, opts: &ReasonerOptions) -> Result<DerivedPolicy, ReasonError> {
    let mut sources = Vec::new();
    for port in &output.from_ports {
        let uncovered = || ReasonError::UncoveredFromPort { output: output.port_name.clone(), input: port.clone() };
        let input = kb.input_index(port).ok_or_else(uncovered)?;
        let before = sources.len();
        let mut seen: HashMap<(&Term, &Term), usize> = HashMap::new();
        for (_, set) in kb.policies_for(input) {
            // identical node ids only recur when one document is loaded twice
            let n = seen.entry((&set.data_node, &set.policy.id)).or_default();
            let key = format!("{}\u{1f}{}\u{1f}{n}", set.data_node, set.policy.id);
            *n += 1;
            sources.push(Source { input_port: port, key, policy: &set.policy });
        }
        if sources.len() == before {
            return Err(uncovered());
        }
    }
    let ids = NodeIds { app: kb.app.name.as_str(), output: &output.port_name };
    let parts = flat_map(&sources, opts, |s| vec![derive_source(&ids, output, s, opts)]);

    let mut merged = Part::default();
    for p in parts {
        merged.attributes.extend(p.attributes);
        merged.links.extend(p.links);
        merged.tags.extend(p.tags);
        merged.prohibitions.extend(p.prohibitions);
        merged.obligations.extend(p.obligations);
    }
    merged.attributes.sort_by(|a, b| a.id.cmp(&b.id));
    merged.links.sort();
    merged.tags.sort_by(|a, b| a.id.cmp(&b.id));
    merged.prohibitions.sort_by(|a, b| a.id.cmp(&b.id));
    merged.obligations.sort_by(|a, b| a.id.cmp(&b.id));

    let attributes: IndexMap<Term, Attribute> = merged.attributes.into_iter().map(|a| (a.id.clone(), a)).collect();
    let policy = Policy {
        id: ids.node("policy", &[]),
        attributes,
        tags: merged.tags,
        prohibitions: merged.prohibitions,
        obligations: merged.obligations,
    };
    Ok(DerivedPolicy {
        output_port: output.port_name.clone(),
        data_node: ids.node("data", &[]),
        policy,
        links: merged.links,
    })
}

fn derive_source(ids: &NodeIds, output: &OutputSpec, s: &Source, opts: &ReasonerOptions) -> Part {
    let new_id = |kind: &str, origin: &Term| ids.node(kind, &[s.input_port, &s.key, &origin.to_string()]);
    let mut part = Part::default();
    let mut io: HashMap<&Term, Term> = HashMap::new();

    let attrs: Vec<&Attribute> = s.policy.attributes.values().collect();
    for attr in ordered(&attrs, opts) {
        let matching = output.refinements.iter().filter(|r| r.filter.matches(s.input_port, attr));
        let mut deleted = false;
        let mut edit: Option<(&Term, &Iri, &Term)> = None;
        for r in matching {
            match &r.kind {
                RefinementKind::Delete => deleted = true,
                RefinementKind::Edit { new_class, new_value } => {
                    if edit.is_none_or(|(id, _, _)| r.id < *id) {
                        edit = Some((&r.id, new_class, new_value));
                    }
                }
            }
        }
        if deleted {
            continue;
        }
        let target = new_id("attr", &attr.id);
        let (class, value) = match edit {
            Some((_, c, v)) => (c.clone(), v.clone()),
            None => (attr.class.clone(), attr.value.clone()),
        };
        part.attributes.push(Attribute { id: target.clone(), name: attr.name.clone(), class, value });
        part.links.push(ForwardLink {
            origin: attr.id.clone(),
            input_port: s.input_port.to_owned(),
            origin_policy: s.policy.id.clone(),
            port: output.port_name.clone(),
            target: target.clone(),
        });
        io.insert(&attr.id, target);
    }

    let remap = |bindings: &BTreeSet<Term>| -> Option<BTreeSet<Term>> {
        bindings.iter().map(|b| io.get(b).cloned()).collect()
    };

    for tag in ordered(&s.policy.tags, opts) {
        let (Some(attribute_ref), Some(validity_bindings)) = (io.get(&tag.attribute_ref), remap(&tag.validity_bindings))
        else {
            continue;
        };
        part.tags.push(Tag {
            id: new_id("tag", &tag.id),
            category: tag.category.clone(),
            attribute_ref: attribute_ref.clone(),
            validity_bindings,
        });
    }
    for pr in ordered(&s.policy.prohibitions, opts) {
        if let Some(validity_bindings) = remap(&pr.validity_bindings) {
            part.prohibitions.push(Prohibition {
                id: new_id("prohibition", &pr.id),
                mode: pr.mode,
                condition: pr.condition.clone(),
                validity_bindings,
            });
        }
    }
    for ob in ordered(&s.policy.obligations, opts) {
        let args: Option<Vec<Term>> = ob.args.iter().map(|a| io.get(a).cloned()).collect();
        if let (Some(args), Some(validity_bindings)) = (args, remap(&ob.validity_bindings)) {
            part.obligations.push(Obligation {
                id: new_id("obligation", &ob.id),
                obligation_class: ob.obligation_class.clone(),
                args,
                condition: ob.condition.clone(),
                validity_bindings,
            });
        }
    }
    part
}

/// Deterministic IRIs for nodes created by derivation.
struct NodeIds<'a> {
    app: &'a str,
    output: &'a str,
}

impl NodeIds<'_> {
    fn node(&self, kind: &str, parts: &[&str]) -> Term {
        let mut h = Sha256::new();
        for p in [kind, self.app, self.output].iter().chain(parts) {
            h.update(p.as_bytes());
            h.update([0x1f]);
        }
        let digest = h.finalize();
        let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        Term::iri(format!("urn:dtou:{kind}:{hex}"))
    }
}
