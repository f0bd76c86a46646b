//! Typed policy → graph, the inverse of extraction.
//!
//! Node ids of the model are reused as graph subjects. Nodes that carry no
//! id in the model (conditions, ports, filters, downstreams) become fresh
//! blank nodes.

use crate::rdf::{Graph, Iri, Term};
use crate::vocab::{default_vocab, Vocab};

use super::model::*;

pub fn policy_to_graph(set: &DataPolicySet) -> Graph {
    policy_to_graph_with(set, default_vocab())
}

pub fn app_policy_to_graph(app: &AppPolicy) -> Graph {
    app_policy_to_graph_with(app, default_vocab())
}

pub fn usage_context_to_graph(ctx: &UsageContext) -> Graph {
    usage_context_to_graph_with(ctx, default_vocab())
}

pub fn policy_to_graph_with(set: &DataPolicySet, v: &Vocab) -> Graph {
    let mut g = Graph::new();
    add_data_policy(&mut g, set, v);
    g
}

/// Adds one policy set to `g`. Ids already present in `g` are shared, so
/// callers merging several sets should make ids distinct first.
pub fn add_data_policy(g: &mut Graph, set: &DataPolicySet, v: &Vocab) {
    let ty = v.rdf_type();
    let p = &set.policy;
    // Type every id first so fresh blanks never collide with them.
    g.add(set.data_node.clone(), ty.clone(), v.data_class.clone());
    if p.term_count() > 0 {
        g.add(p.id.clone(), ty.clone(), v.policy_class.clone());
    }
    for id in p.attributes.keys() {
        g.add(id.clone(), ty.clone(), v.attribute_class.clone());
    }
    for t in &p.tags {
        let class = match t.category {
            TagCategory::Security => &v.security_tag,
            TagCategory::Integrity => &v.integrity_tag,
            TagCategory::Purpose => &v.purpose_tag,
            TagCategory::Other(_) => &v.tag_class,
        };
        g.add(t.id.clone(), ty.clone(), class.clone());
    }
    for pr in &p.prohibitions {
        g.add(pr.id.clone(), ty.clone(), v.prohibition_class.clone());
    }
    for ob in &p.obligations {
        g.add(ob.id.clone(), ty.clone(), v.obligation_class_type.clone());
    }

    g.add(set.data_node.clone(), v.uri.clone(), set.uri.clone());
    g.add(set.data_node.clone(), v.policy.clone(), p.id.clone());
    for a in p.attributes.values() {
        g.add(p.id.clone(), v.attribute.clone(), a.id.clone());
        g.add(a.id.clone(), v.name.clone(), a.name.clone());
        g.add(a.id.clone(), v.class.clone(), a.class.clone());
        g.add(a.id.clone(), v.value.clone(), a.value.clone());
    }
    for t in &p.tags {
        let listing = match &t.category {
            TagCategory::Security => &v.security_p,
            TagCategory::Integrity => &v.integrity_p,
            TagCategory::Purpose => &v.purpose,
            TagCategory::Other(c) => {
                g.add(t.id.clone(), v.category.clone(), c.clone());
                &v.tag
            }
        };
        g.add(p.id.clone(), listing.clone(), t.id.clone());
        g.add(t.id.clone(), v.attribute_ref.clone(), t.attribute_ref.clone());
        for b in &t.validity_bindings {
            g.add(t.id.clone(), v.validity_binding.clone(), b.clone());
        }
    }
    for pr in &p.prohibitions {
        g.add(p.id.clone(), v.prohibition.clone(), pr.id.clone());
        g.add(pr.id.clone(), v.mode.clone(), v.use_mode.clone());
        add_condition(g, &pr.id, &pr.condition, v);
        for b in &pr.validity_bindings {
            g.add(pr.id.clone(), v.validity_binding.clone(), b.clone());
        }
    }
    for ob in &p.obligations {
        g.add(p.id.clone(), v.obligation.clone(), ob.id.clone());
        g.add(ob.id.clone(), v.obligation_class.clone(), ob.obligation_class.clone());
        if !ob.args.is_empty() {
            let head = g.insert_collection(&ob.args);
            g.add(ob.id.clone(), v.args.clone(), head);
        }
        add_condition(g, &ob.id, &ob.condition, v);
        for b in &ob.validity_bindings {
            g.add(ob.id.clone(), v.validity_binding.clone(), b.clone());
        }
    }
}

fn add_condition(g: &mut Graph, owner: &Term, c: &ActivationCondition, v: &Vocab) {
    let node = g.fresh_blank();
    g.add(owner.clone(), v.activation_condition.clone(), node.clone());
    add_opt(g, &node, &v.user, &c.user);
    add_opt(g, &node, &v.app_name, &c.app_name);
    add_opt(g, &node, &v.purpose, &c.purpose);
}

fn add_opt(g: &mut Graph, node: &Term, pred: &Iri, value: &Option<Iri>) {
    if let Some(value) = value {
        g.add(node.clone(), pred.clone(), value.clone());
    }
}

fn add_port(g: &mut Graph, owner: &Term, pred: &Iri, name: &str, v: &Vocab) {
    let node = g.fresh_blank();
    g.add(owner.clone(), pred.clone(), node.clone());
    g.add(node, v.name.clone(), Term::literal(name));
}

fn add_capacity(g: &mut Graph, owner: &Term, pred: &Iri, key: &TagKey, v: &Vocab) {
    let node = g.fresh_blank();
    g.add(owner.clone(), pred.clone(), node.clone());
    g.add(node.clone(), v.category.clone(), key.category.iri(v));
    g.add(node, v.descriptor.clone(), key.descriptor.clone());
}

pub fn app_policy_to_graph_with(app: &AppPolicy, v: &Vocab) -> Graph {
    let ty = v.rdf_type();
    let mut g = Graph::new();
    g.add(app.id.clone(), ty.clone(), v.app_policy_class.clone());
    for i in &app.inputs {
        g.add(i.id.clone(), ty.clone(), v.input_spec_class.clone());
    }
    for o in &app.outputs {
        g.add(o.id.clone(), ty.clone(), v.output_spec_class.clone());
        for r in &o.refinements {
            let class = match r.kind {
                RefinementKind::Delete => &v.delete,
                RefinementKind::Edit { .. } => &v.edit,
            };
            g.add(r.id.clone(), ty.clone(), class.clone());
        }
    }

    g.add(app.id.clone(), v.name.clone(), app.name.clone());
    for i in &app.inputs {
        g.add(app.id.clone(), v.input_spec.clone(), i.id.clone());
        g.add(i.id.clone(), v.data.clone(), i.data_uri.clone());
        add_port(&mut g, &i.id, &v.port, &i.port_name, v);
        for key in &i.provides {
            match key.category {
                TagCategory::Security => g.add(i.id.clone(), v.security_p.clone(), key.descriptor.clone()),
                _ => add_capacity(&mut g, &i.id, &v.provide, key, v),
            }
        }
        for key in &i.expects {
            match key.category {
                TagCategory::Integrity => g.add(i.id.clone(), v.integrity_p.clone(), key.descriptor.clone()),
                _ => add_capacity(&mut g, &i.id, &v.expect, key, v),
            }
        }
        for p in &i.purposes {
            g.add(i.id.clone(), v.purpose.clone(), p.clone());
        }
        for ds in &i.downstreams {
            let node = g.fresh_blank();
            g.add(i.id.clone(), v.downstream.clone(), node.clone());
            g.add(node.clone(), v.app_name.clone(), ds.app_name.clone());
            add_opt(&mut g, &node, &v.user, &ds.user);
            add_opt(&mut g, &node, &v.purpose, &ds.purpose);
        }
    }
    for o in &app.outputs {
        g.add(app.id.clone(), v.output_spec.clone(), o.id.clone());
        add_port(&mut g, &o.id, &v.port, &o.port_name, v);
        for from in &o.from_ports {
            add_port(&mut g, &o.id, &v.from, from, v);
        }
        for r in &o.refinements {
            g.add(o.id.clone(), v.refinement.clone(), r.id.clone());
            if let RefinementKind::Edit { new_class, new_value } = &r.kind {
                g.add(r.id.clone(), v.new_class.clone(), new_class.clone());
                g.add(r.id.clone(), v.new_value.clone(), new_value.clone());
            }
            let f = g.fresh_blank();
            g.add(r.id.clone(), v.filter.clone(), f.clone());
            if let Some(port) = &r.filter.input_port {
                add_port(&mut g, &f, &v.input, port, v);
            }
            add_opt(&mut g, &f, &v.name, &r.filter.name);
            add_opt(&mut g, &f, &v.class, &r.filter.class);
            if let Some(value) = &r.filter.value {
                g.add(f.clone(), v.value.clone(), value.clone());
            }
        }
    }
    g
}

/// Encodes the context with an inline `:AppInfo` node pointing at the app id.
pub fn usage_context_to_graph_with(ctx: &UsageContext, v: &Vocab) -> Graph {
    let ty = v.rdf_type();
    let mut g = Graph::new();
    g.add(ctx.id.clone(), ty.clone(), v.usage_context.clone());
    g.add(ctx.id.clone(), v.user.clone(), ctx.user.clone());
    g.add(ctx.id.clone(), v.time.clone(), Term::Literal(ctx.time.clone()));
    let info = g.fresh_blank();
    g.add(ctx.id.clone(), v.app.clone(), info.clone());
    g.add(info.clone(), ty, v.app_info.clone());
    g.add(info, v.policy.clone(), ctx.app_policy.clone());
    g
}
