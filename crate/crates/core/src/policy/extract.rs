//! Graph → typed policy binding, with structural validation.

use std::collections::{BTreeSet, HashSet};

use indexmap::IndexMap;

use super::model::*;
use super::PolicyError;
use crate::rdf::{Graph, Iri, Term};
use crate::vocab::{default_vocab, Vocab};

/// One [`DataPolicySet`] per `:Data` node in the graph.
pub fn extract_data_policies(graph: &Graph) -> Result<Vec<DataPolicySet>, PolicyError> {
    extract_data_policies_with(graph, default_vocab())
}

/// The single `:AppPolicy` in the graph.
pub fn extract_app_policy(graph: &Graph) -> Result<AppPolicy, PolicyError> {
    extract_app_policy_with(graph, default_vocab())
}

/// The single `:UsageContext` in the graph.
pub fn extract_usage_context(graph: &Graph) -> Result<UsageContext, PolicyError> {
    extract_usage_context_with(graph, default_vocab())
}

pub fn extract_data_policies_with(graph: &Graph, vocab: &Vocab) -> Result<Vec<DataPolicySet>, PolicyError> {
    let r = Reader { g: graph, v: vocab };
    let data_class = Term::Iri(vocab.data_class.clone());
    graph.instances_of(&data_class).map(|node| r.data_policy(node)).collect()
}

pub fn extract_app_policy_with(graph: &Graph, vocab: &Vocab) -> Result<AppPolicy, PolicyError> {
    let r = Reader { g: graph, v: vocab };
    let class = Term::Iri(vocab.app_policy_class.clone());
    let nodes: Vec<&Term> = graph.instances_of(&class).collect();
    match nodes.as_slice() {
        [node] => r.app_policy(node),
        _ => Err(PolicyError::Cardinality { class: "AppPolicy", found: nodes.len() }),
    }
}

pub fn extract_usage_context_with(graph: &Graph, vocab: &Vocab) -> Result<UsageContext, PolicyError> {
    let r = Reader { g: graph, v: vocab };
    let class = Term::Iri(vocab.usage_context.clone());
    let nodes: Vec<&Term> = graph.instances_of(&class).collect();
    let [node] = nodes.as_slice() else {
        return Err(PolicyError::Cardinality { class: "UsageContext", found: nodes.len() });
    };
    let user = r.one_iri(node, &vocab.user, "user")?;
    let app = r.one(node, &vocab.app, "app")?;
    let app_policy = match r.opt(app, &vocab.policy, "policy")? {
        Some(p) => p.clone(),
        None => app.clone(),
    };
    let time = r.one(node, &vocab.time, "time")?;
    let Term::Literal(time) = time else {
        return Err(PolicyError::WrongKind { node: (*node).clone(), field: "time", expected: "a literal" });
    };
    Ok(UsageContext { id: (*node).clone(), user, app_policy, time: time.clone() })
}

struct Reader<'a> {
    g: &'a Graph,
    v: &'a Vocab,
}

impl<'a> Reader<'a> {
    fn all(&self, node: &'a Term, pred: &'a Iri) -> Vec<&'a Term> {
        let mut seen = HashSet::new();
        self.g.objects(node, pred).filter(|t| seen.insert(*t)).collect()
    }

    fn opt(&self, node: &'a Term, pred: &'a Iri, field: &'static str) -> Result<Option<&'a Term>, PolicyError> {
        let mut it = self.g.objects(node, pred);
        let first = it.next();
        let rest = it.count();
        if rest > 0 {
            return Err(PolicyError::Multiple { node: node.clone(), field, found: rest + 1 });
        }
        Ok(first)
    }

    fn one(&self, node: &'a Term, pred: &'a Iri, field: &'static str) -> Result<&'a Term, PolicyError> {
        self.opt(node, pred, field)?.ok_or_else(|| PolicyError::Missing { node: node.clone(), field })
    }

    fn iri(&self, node: &Term, term: &Term, field: &'static str) -> Result<Iri, PolicyError> {
        term.as_iri()
            .cloned()
            .ok_or_else(|| PolicyError::WrongKind { node: node.clone(), field, expected: "an IRI" })
    }

    fn one_iri(&self, node: &'a Term, pred: &'a Iri, field: &'static str) -> Result<Iri, PolicyError> {
        let t = self.one(node, pred, field)?;
        self.iri(node, t, field)
    }

    fn opt_iri(&self, node: &'a Term, pred: &'a Iri, field: &'static str) -> Result<Option<Iri>, PolicyError> {
        self.opt(node, pred, field)?.map(|t| self.iri(node, t, field)).transpose()
    }

    fn value(&self, node: &Term, term: &Term, field: &'static str) -> Result<Term, PolicyError> {
        if term.is_blank() {
            return Err(PolicyError::WrongKind { node: node.clone(), field, expected: "an IRI or literal" });
        }
        Ok(term.clone())
    }

    fn data_policy(&self, node: &'a Term) -> Result<DataPolicySet, PolicyError> {
        let uri = self.one_iri(node, &self.v.uri, "uri")?;
        let policy_node = self.one(node, &self.v.policy, "policy")?;
        let policy = self.policy(policy_node)?;
        Ok(DataPolicySet { data_node: node.clone(), uri, policy })
    }

    fn policy(&self, node: &'a Term) -> Result<Policy, PolicyError> {
        let v = self.v;
        let mut attributes = IndexMap::new();
        for id in self.all(node, &v.attribute) {
            let attr = Attribute {
                id: id.clone(),
                name: self.one_iri(id, &v.name, "name")?,
                class: self.one_iri(id, &v.class, "class")?,
                value: self.value(id, self.one(id, &v.value, "value")?, "value")?,
            };
            attributes.insert(id.clone(), attr);
        }
        let resolve = |owner: &Term, field: &'static str, target: &Term| -> Result<Term, PolicyError> {
            if attributes.contains_key(target) {
                Ok(target.clone())
            } else {
                Err(PolicyError::Dangling { node: owner.clone(), field, target: target.clone() })
            }
        };
        let bindings = |owner: &'a Term| -> Result<BTreeSet<Term>, PolicyError> {
            self.all(owner, &v.validity_binding)
                .into_iter()
                .map(|b| resolve(owner, "validity_binding", b))
                .collect()
        };

        let mut tags: Vec<Tag> = Vec::new();
        let listings = [
            (&v.security_p, Some(TagCategory::Security)),
            (&v.integrity_p, Some(TagCategory::Integrity)),
            (&v.purpose, Some(TagCategory::Purpose)),
            (&v.tag, None),
        ];
        for (pred, listed) in listings {
            for id in self.all(node, pred) {
                let category = self.tag_category(id, listed.as_ref())?;
                if let Some(existing) = tags.iter().find(|t| &t.id == id) {
                    if existing.category != category {
                        return Err(PolicyError::Invalid {
                            node: id.clone(),
                            msg: format!("listed under several categories ({} and {category})", existing.category),
                        });
                    }
                    continue;
                }
                let attribute_ref = resolve(id, "attribute_ref", self.one(id, &v.attribute_ref, "attribute_ref")?)?;
                tags.push(Tag { id: id.clone(), category, attribute_ref, validity_bindings: bindings(id)? });
            }
        }

        let mut prohibitions = Vec::new();
        for id in self.all(node, &v.prohibition) {
            if let Some(mode) = self.opt(id, &v.mode, "mode")? {
                if mode.as_iri() != Some(&v.use_mode) {
                    return Err(PolicyError::Invalid { node: id.clone(), msg: format!("unsupported mode {mode:?}") });
                }
            }
            prohibitions.push(Prohibition {
                id: id.clone(),
                mode: UseMode::Use,
                condition: self.condition(id)?,
                validity_bindings: bindings(id)?,
            });
        }

        let mut obligations = Vec::new();
        for id in self.all(node, &v.obligation) {
            let args = match self.opt(id, &v.args, "args")? {
                None => Vec::new(),
                Some(head) => {
                    let items = self.g.collection(head).ok_or_else(|| PolicyError::WrongKind {
                        node: id.clone(),
                        field: "args",
                        expected: "a well-formed collection",
                    })?;
                    items.iter().map(|a| resolve(id, "args", a)).collect::<Result<_, _>>()?
                }
            };
            obligations.push(Obligation {
                id: id.clone(),
                obligation_class: self.one_iri(id, &v.obligation_class, "obligation_class")?,
                args,
                condition: self.condition(id)?,
                validity_bindings: bindings(id)?,
            });
        }

        Ok(Policy { id: node.clone(), attributes, tags, prohibitions, obligations })
    }

    fn tag_category(&self, id: &'a Term, listed: Option<&TagCategory>) -> Result<TagCategory, PolicyError> {
        let v = self.v;
        let rdf_type = v.rdf_type();
        let mut from_type = None;
        for ty in self.g.objects(id, &rdf_type) {
            let cat = match ty.as_iri() {
                Some(t) if *t == v.security_tag => TagCategory::Security,
                Some(t) if *t == v.integrity_tag => TagCategory::Integrity,
                Some(t) if *t == v.purpose_tag => TagCategory::Purpose,
                _ => continue,
            };
            if from_type.as_ref().is_some_and(|c| *c != cat) {
                return Err(PolicyError::Invalid { node: id.clone(), msg: "tag has several category types".to_owned() });
            }
            from_type = Some(cat);
        }
        let explicit = self.opt_iri(id, &v.category, "category")?.map(|c| TagCategory::from_iri(&c, v));
        let mut category = None;
        for c in [from_type, explicit, listed.cloned()].into_iter().flatten() {
            match &category {
                None => category = Some(c),
                Some(existing) if *existing != c => {
                    return Err(PolicyError::Invalid {
                        node: id.clone(),
                        msg: format!("conflicting tag categories {existing} and {c}"),
                    })
                }
                Some(_) => {}
            }
        }
        category.ok_or_else(|| PolicyError::Missing { node: id.clone(), field: "category" })
    }

    fn condition(&self, owner: &'a Term) -> Result<ActivationCondition, PolicyError> {
        let v = self.v;
        let node = self.one(owner, &v.activation_condition, "activation_condition")?;
        let cond = ActivationCondition {
            user: self.opt_iri(node, &v.user, "user")?,
            app_name: self.opt_iri(node, &v.app_name, "app_name")?,
            purpose: self.opt_iri(node, &v.purpose, "purpose")?,
        };
        if cond.is_empty() {
            return Err(PolicyError::Invalid { node: owner.clone(), msg: "activation condition matches on nothing".to_owned() });
        }
        Ok(cond)
    }

    fn port_name(&self, owner: &'a Term, port: &'a Term, field: &'static str) -> Result<String, PolicyError> {
        let name = match port {
            Term::Literal(_) => port,
            _ => self.one(port, &self.v.name, "name")?,
        };
        match name {
            Term::Literal(l) => Ok(l.lexical().to_owned()),
            _ => Err(PolicyError::WrongKind { node: owner.clone(), field, expected: "a port name literal" }),
        }
    }

    fn app_policy(&self, node: &'a Term) -> Result<AppPolicy, PolicyError> {
        let v = self.v;
        let name = self.one_iri(node, &v.name, "name")?;
        let mut inputs: Vec<InputSpec> = Vec::new();
        for id in self.all(node, &v.input_spec) {
            let input = self.input_spec(id)?;
            if inputs.iter().any(|i| i.port_name == input.port_name) {
                return Err(PolicyError::DuplicatePort { port: input.port_name, kind: "input" });
            }
            inputs.push(input);
        }
        let mut outputs: Vec<OutputSpec> = Vec::new();
        for id in self.all(node, &v.output_spec) {
            let output = self.output_spec(id, &inputs)?;
            if outputs.iter().any(|o| o.port_name == output.port_name) {
                return Err(PolicyError::DuplicatePort { port: output.port_name, kind: "output" });
            }
            outputs.push(output);
        }
        Ok(AppPolicy { id: node.clone(), name, inputs, outputs })
    }

    fn input_spec(&self, id: &'a Term) -> Result<InputSpec, PolicyError> {
        let v = self.v;
        let port_name = self.port_name(id, self.one(id, &v.port, "port")?, "port")?;
        let data_uri = self.one_iri(id, &v.data, "data")?;
        let mut provides = BTreeSet::new();
        let mut expects = BTreeSet::new();
        let mut purposes = BTreeSet::new();
        for d in self.all(id, &v.security_p) {
            provides.insert(TagKey::new(TagCategory::Security, self.iri(id, d, "security")?));
        }
        for d in self.all(id, &v.integrity_p) {
            expects.insert(TagKey::new(TagCategory::Integrity, self.iri(id, d, "integrity")?));
        }
        for p in self.all(id, &v.purpose) {
            purposes.insert(self.iri(id, p, "purpose")?);
        }
        for node in self.all(id, &v.provide) {
            let key = self.capacity(node)?;
            if !key.category.is_requirement() {
                return Err(PolicyError::Invalid {
                    node: node.clone(),
                    msg: format!("{} cannot be provided, only expected", key.category),
                });
            }
            provides.insert(key);
        }
        for node in self.all(id, &v.expect) {
            let key = self.capacity(node)?;
            match key.category {
                TagCategory::Security => {
                    return Err(PolicyError::Invalid { node: node.clone(), msg: "Security cannot be expected, only provided".to_owned() })
                }
                TagCategory::Purpose => {
                    purposes.insert(key.descriptor);
                }
                _ => {
                    expects.insert(key);
                }
            }
        }
        let mut downstreams = Vec::new();
        for ds in self.all(id, &v.downstream) {
            downstreams.push(Downstream {
                app_name: self.one_iri(ds, &v.app_name, "app_name")?,
                user: self.opt_iri(ds, &v.user, "user")?,
                purpose: self.opt_iri(ds, &v.purpose, "purpose")?,
            });
        }
        // downstream nodes are usually blank, so graph order carries no meaning
        downstreams.sort();
        downstreams.dedup();
        Ok(InputSpec { id: id.clone(), port_name, data_uri, provides, expects, purposes, downstreams })
    }

    fn capacity(&self, node: &'a Term) -> Result<TagKey, PolicyError> {
        let category = self.one_iri(node, &self.v.category, "category")?;
        let descriptor = self.one_iri(node, &self.v.descriptor, "descriptor")?;
        Ok(TagKey::new(TagCategory::from_iri(&category, self.v), descriptor))
    }

    fn output_spec(&self, id: &'a Term, inputs: &[InputSpec]) -> Result<OutputSpec, PolicyError> {
        let v = self.v;
        let port_name = self.port_name(id, self.one(id, &v.port, "port")?, "port")?;
        let known = |port: &str| inputs.iter().any(|i| i.port_name == port);
        let mut from_ports = BTreeSet::new();
        for from in self.all(id, &v.from) {
            let port = self.port_name(id, from, "from")?;
            if !known(&port) {
                return Err(PolicyError::Dangling { node: id.clone(), field: "from", target: Term::literal(&port) });
            }
            from_ports.insert(port);
        }
        let rdf_type = v.rdf_type();
        let mut refinements = Vec::new();
        for rid in self.all(id, &v.refinement) {
            let is_delete = self.g.has_type(rid, &Term::Iri(v.delete.clone()));
            let is_edit = self.g.has_type(rid, &Term::Iri(v.edit.clone()));
            let new_class = self.opt_iri(rid, &v.new_class, "new_class")?;
            let new_value = self.opt(rid, &v.new_value, "new_value")?.map(|t| self.value(rid, t, "new_value")).transpose()?;
            let kind = match (is_delete, is_edit) {
                (true, false) => {
                    if new_class.is_some() || new_value.is_some() {
                        return Err(PolicyError::Invalid { node: rid.clone(), msg: "Delete carries new_class/new_value".to_owned() });
                    }
                    RefinementKind::Delete
                }
                (false, true) => RefinementKind::Edit {
                    new_class: new_class.ok_or_else(|| PolicyError::Missing { node: rid.clone(), field: "new_class" })?,
                    new_value: new_value.ok_or_else(|| PolicyError::Missing { node: rid.clone(), field: "new_value" })?,
                },
                _ => {
                    let _ = &rdf_type;
                    return Err(PolicyError::Invalid { node: rid.clone(), msg: "refinement must be typed either Delete or Edit".to_owned() });
                }
            };
            let fnode = self.one(rid, &v.filter, "filter")?;
            let input_port = self.opt(fnode, &v.input, "input")?.map(|p| self.port_name(rid, p, "input")).transpose()?;
            if let Some(port) = &input_port {
                if !known(port) {
                    return Err(PolicyError::Dangling { node: rid.clone(), field: "input", target: Term::literal(port) });
                }
            }
            let filter = Filter {
                input_port,
                name: self.opt_iri(fnode, &v.name, "name")?,
                class: self.opt_iri(fnode, &v.class, "class")?,
                value: self.opt(fnode, &v.value, "value")?.map(|t| self.value(fnode, t, "value")).transpose()?,
            };
            if filter.is_empty() {
                return Err(PolicyError::Invalid { node: rid.clone(), msg: "empty filter".to_owned() });
            }
            refinements.push(Refinement { id: rid.clone(), kind, filter });
        }
        Ok(OutputSpec { id: id.clone(), port_name, from_ports: from_ports.into_iter().collect(), refinements })
    }
}
