//! The worked examples, checked against hand-derived expectations.

use dtou_core::policy::{
    extract_app_policy, extract_data_policies, extract_usage_context, policy_to_graph, DataPolicySet, Policy,
    PolicyError, RefinementKind, TagCategory, TagKey,
};
use dtou_core::rdf::ns;
use dtou_core::reasoner::{
    check_conformance, check_obligations, derive_policies, derive_policy, ConflictKind, ReasonerOptions, Warning,
};
use dtou_core::{parse_turtle, serialize_turtle, Graph, Iri, KnowledgeBase, ReasonError, Term, Vocab};
use dtou_testkit::fixtures::{self, graph, v};
use dtou_testkit::summary::canonical;

fn iri(local: &str) -> Iri {
    Iri::new(v(local))
}

fn opts() -> ReasonerOptions {
    ReasonerOptions::default()
}

fn happy_kb() -> KnowledgeBase {
    KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(fixtures::HAPPY_SHOP), &fixtures::data_graphs())
        .unwrap()
}

fn only(text: &str) -> DataPolicySet {
    let mut sets = extract_data_policies(&graph(text)).unwrap();
    assert_eq!(sets.len(), 1);
    sets.remove(0)
}

// ---- rdf ----

#[test]
fn match_on_attribute_value() {
    let g = graph(fixtures::LISTINGS[0].1);
    let value = Iri::new(v("value"));
    let subject = Term::iri(v("attr1"));
    let found: Vec<_> = g.matching(Some(&subject), Some(&value), None).collect();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].object, Term::literal("alice@a.b"));
    assert_eq!(Graph::new().matching(None, None, None).count(), 0);
}

#[test]
fn payment_info_has_four_attribute_subjects() {
    let g = graph(fixtures::PAYMENT_INFO);
    let ty = Iri::new(ns::RDF_TYPE);
    let class = Term::iri(v("Attribute"));
    let mut subjects: Vec<String> =
        g.matching(None, Some(&ty), Some(&class)).map(|t| t.subject.to_string()).collect();
    subjects.sort();
    let mut expected: Vec<String> = ["attr-tag2", "attr-tag3", "attr-tag4", "attr2"].iter().map(|s| v(s)).collect();
    expected.sort();
    assert_eq!(subjects, expected);
}

#[test]
fn every_listing_parses() {
    for (name, text) in fixtures::LISTINGS {
        let result = parse_turtle(text, None);
        if *name == "app-policy-set.ttl" {
            // `[ ;name "address-in" ]` is not Turtle
            let err = result.expect_err("the `;name` typo must be rejected");
            assert_eq!(err.line, 8, "{err}");
            let fixed = text.replace("[ ;name", "[ :name");
            parse_turtle(&fixed, None).unwrap_or_else(|e| panic!("{name} after correction: {e}"));
        } else {
            result.unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn fixtures_round_trip_through_turtle() {
    let vocab = Vocab::default();
    for (name, text) in fixtures::DOCUMENTS {
        let g = graph(text);
        let out = serialize_turtle(&g, &vocab.prefixes());
        let back = parse_turtle(&out, None).unwrap_or_else(|e| panic!("{name}: {e}\n{out}"));
        assert!(g.is_isomorphic(&back), "{name}:\n{out}");
    }
}

// ---- policy model ----

#[test]
fn payment_info_extracts() {
    let set = only(fixtures::PAYMENT_INFO);
    assert_eq!(set.uri.as_str(), "http://a.b/payment-info");
    let p = &set.policy;
    assert_eq!(p.attributes.len(), 4);
    let keys = |cat: TagCategory| -> Vec<Iri> {
        p.tags.iter().filter(|t| t.category == cat).map(|t| p.descriptor(t).unwrap().clone()).collect()
    };
    assert_eq!(keys(TagCategory::Security), vec![iri("banking")]);
    let mut purposes = keys(TagCategory::Purpose);
    purposes.sort();
    assert_eq!(purposes, vec![iri("make-payment"), iri("verify-ownership")]);
    let attr2 = Term::iri(v("attr2"));
    assert!(p.tags.iter().all(|t| t.validity_bindings.iter().eq([&attr2])));
    assert_eq!(p.prohibitions.len(), 1);
    assert_eq!(p.prohibitions[0].condition.app_name, Some(Iri::new("http://duckpay.com/")));
    assert!(p.prohibitions[0].validity_bindings.contains(&attr2));
}

#[test]
fn data_without_policy_is_rejected() {
    let err = extract_data_policies(&graph(":d a :Data; :uri <http://x/> .")).unwrap_err();
    assert!(matches!(err, PolicyError::Missing { field: "policy", .. }), "{err}");
}

#[test]
fn shoe_size_extracts() {
    let set = only(fixtures::SHOE_SIZE);
    let p = &set.policy;
    assert_eq!(p.attributes.len(), 1);
    assert_eq!(p.obligations.len(), 1);
    let ob = &p.obligations[0];
    assert_eq!(ob.obligation_class, iri("send-email"));
    assert_eq!(ob.args, vec![Term::iri(v("attr1"))]);
    assert_eq!(ob.condition.purpose, Some(iri("research")));
    assert_eq!(ob.condition.user, None);
}

#[test]
fn happy_shop_extracts() {
    let app = extract_app_policy(&graph(fixtures::HAPPY_SHOP)).unwrap();
    assert_eq!(app.name.as_str(), "http://happy.shop");
    assert_eq!(app.inputs.len(), 2);
    let pay = app.input("payment-info-in").unwrap();
    assert_eq!(pay.provides.iter().collect::<Vec<_>>(), [&TagKey::new(TagCategory::Security, iri("banking"))]);
    assert_eq!(pay.purposes.iter().collect::<Vec<_>>(), [&iri("make-payment")]);
    assert_eq!(pay.downstreams.len(), 1);
    assert_eq!(pay.downstreams[0].app_name.as_str(), "http://goodpay.com/");
    let addr = app.input("address-in").unwrap();
    assert_eq!(addr.expects.iter().collect::<Vec<_>>(), [&TagKey::new(TagCategory::Integrity, iri("full-address"))]);
    assert_eq!(app.outputs.len(), 1);
    let out = app.output("out1-port").unwrap();
    assert_eq!(out.from_ports, ["address-in", "payment-info-in"]);
    assert_eq!(out.refinements.len(), 1);
    let r = &out.refinements[0];
    assert_eq!(r.kind, RefinementKind::Delete);
    assert_eq!(r.filter.class, Some(iri("data-content")));
    assert_eq!(r.filter.value, Some(Term::iri(v("payment-details"))));
    assert_eq!(r.filter.input_port, None);
}

#[test]
fn two_app_policies_are_rejected() {
    let text = format!("{}\n:other a :AppPolicy; :name <http://other/> .", fixtures::HAPPY_SHOP);
    let err = extract_app_policy(&graph(&text)).unwrap_err();
    assert_eq!(err, PolicyError::Cardinality { class: "AppPolicy", found: 2 });
}

#[test]
fn from_naming_unknown_port_is_dangling() {
    let text = fixtures::HAPPY_SHOP.replace("[ :name \"address-in\" ],", "[ :name \"nowhere\" ],");
    let err = extract_app_policy(&graph(&text)).unwrap_err();
    assert!(matches!(&err, PolicyError::Dangling { field: "from", target, .. } if *target == Term::literal("nowhere")), "{err}");
}

#[test]
fn usage_context_extracts() {
    let ctx = extract_usage_context(&graph(fixtures::USAGE_CONTEXT)).unwrap();
    assert_eq!(ctx.user.as_str(), "http://a.b/alice#card");
    assert_eq!(ctx.time.lexical(), "20230823");
    // the inline AppInfo node resolves to the app policy it names
    assert_eq!(ctx.app_policy, Term::iri(v("app-policy")));
    let app = extract_app_policy(&graph(fixtures::HAPPY_SHOP)).unwrap();
    assert_eq!(ctx.app_policy, app.id);

    let err = extract_usage_context(&graph(":c a :UsageContext; :app :a; :time \"1\" .")).unwrap_err();
    assert!(matches!(err, PolicyError::Missing { field: "user", .. }), "{err}");
}

#[test]
fn payment_info_round_trips_through_the_model() {
    let vocab = Vocab::default();
    let set = only(fixtures::PAYMENT_INFO);
    let back = extract_data_policies(&policy_to_graph(&set)).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(canonical(&back[0], &vocab), canonical(&set, &vocab));
    // ids are reused, so the round trip is exact here
    assert_eq!(back[0], set);
}

#[test]
fn empty_policy_encodes_to_three_triples() {
    let set = DataPolicySet {
        data_node: Term::iri(v("d")),
        uri: Iri::new("http://x/"),
        policy: Policy {
            id: Term::iri(v("p")),
            attributes: Default::default(),
            tags: vec![],
            prohibitions: vec![],
            obligations: vec![],
        },
    };
    let g = policy_to_graph(&set);
    assert_eq!(g.len(), 3, "{g:?}");
    assert_eq!(extract_data_policies(&g).unwrap(), vec![set]);
}

// ---- reasoner ----

#[test]
fn assembly_pairs_by_uri() {
    let kb = happy_kb();
    let mut pairs: Vec<(String, String)> = kb
        .pairings
        .iter()
        .map(|p| (kb.app.inputs[p.input].port_name.clone(), kb.data_policies[p.policy].uri.to_string()))
        .collect();
    pairs.sort();
    assert_eq!(
        pairs,
        [
            ("address-in".to_owned(), "http://a.b/address".to_owned()),
            ("payment-info-in".to_owned(), "http://a.b/payment-info".to_owned())
        ]
    );
    assert!(kb.uncovered_inputs.is_empty());
}

#[test]
fn app_without_inputs_has_no_pairings() {
    let app = graph(":app-policy a :AppPolicy; :name <http://happy.shop> .");
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &app, &fixtures::data_graphs()).unwrap();
    assert!(kb.pairings.is_empty());
    assert!(check_conformance(&kb, &opts()).is_empty());
}

#[test]
fn duplicate_uris_pair_with_every_policy() {
    let mut data = fixtures::data_graphs();
    data.push(graph(&fixtures::PAYMENT_INFO.replace(":data-payment", ":data-payment-copy")));
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(fixtures::HAPPY_SHOP), &data).unwrap();
    let port = kb.input_index("payment-info-in").unwrap();
    assert_eq!(kb.policies_for(port).count(), 2);
    assert!(kb.warnings.iter().any(|w| matches!(w, Warning::DuplicateUri { count: 2, .. })));
}

#[test]
fn happy_shop_conforms() {
    assert_eq!(check_conformance(&happy_kb(), &opts()), vec![]);
}

#[test]
fn duckpay_downstream_is_prohibited() {
    let app = fixtures::HAPPY_SHOP.replace("<http://goodpay.com/>", "<http://duckpay.com/>");
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(&app), &fixtures::data_graphs()).unwrap();
    let conflicts = check_conformance(&kb, &opts());
    assert_eq!(conflicts.len(), 1, "{conflicts:?}");
    let c = &conflicts[0];
    assert_eq!(c.kind, ConflictKind::ProhibitedUse);
    assert_eq!(c.input_port, "payment-info-in");
    assert_eq!(c.app_name.as_ref().map(Iri::as_str), Some("http://duckpay.com/"));
    assert_eq!(c.purpose, Some(iri("make-payment")));
}

#[test]
fn missing_capacity_and_missing_tag() {
    let app = fixtures::HAPPY_SHOP.replace("    :security :banking;\n", "");
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(&app), &fixtures::data_graphs()).unwrap();
    let conflicts = check_conformance(&kb, &opts());
    assert_eq!(conflicts.len(), 1);
    assert_eq!(conflicts[0].kind, ConflictKind::UnsatisfiedRequirement);
    assert_eq!(conflicts[0].category, Some(TagCategory::Security));
    assert_eq!(conflicts[0].descriptor, Some(iri("banking")));

    let untagged = graph(":addr a :Data; :uri <http://a.b/address>; :policy :p . :p a :Policy .");
    let mut data = fixtures::data_graphs();
    data[2] = untagged;
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(fixtures::HAPPY_SHOP), &data).unwrap();
    let conflicts = check_conformance(&kb, &opts());
    assert_eq!(conflicts.len(), 1);
    assert_eq!(conflicts[0].kind, ConflictKind::UnmatchedExpectation);
    assert_eq!(conflicts[0].category, Some(TagCategory::Integrity));
    assert_eq!(conflicts[0].descriptor, Some(iri("full-address")));
    assert_eq!(conflicts[0].input_port, "address-in");
}

fn research_kb(app_text: &str) -> KnowledgeBase {
    KnowledgeBase::assemble(&graph(fixtures::RESEARCH_CONTEXT), &graph(app_text), &fixtures::data_graphs()).unwrap()
}

#[test]
fn research_use_activates_send_email() {
    let found = check_obligations(&research_kb(fixtures::RESEARCH_APP), &opts());
    assert_eq!(found.len(), 1);
    let ob = &found[0];
    assert_eq!(ob.obligation_class, iri("send-email"));
    assert_eq!(ob.input_port, "shoe-size-in");
    assert_eq!(ob.arg_values.len(), 1);
    assert_eq!(ob.arg_values[0].name, iri("alice-email"));
    assert_eq!(ob.arg_values[0].class, iri("string"));
    assert_eq!(ob.arg_values[0].value, Term::literal("alice@a.b"));

    let other = fixtures::RESEARCH_APP.replace(":purpose :research", ":purpose :making-payment");
    assert!(check_obligations(&research_kb(&other), &opts()).is_empty());
}

#[test]
fn user_only_condition_fires_once_per_input() {
    let data = graph(
        ":d a :Data; :uri <http://a.b/shoe-size>; :policy :p .
         :p :attribute :a; :obligation :ob .
         :a a :Attribute; :name :n; :class :c; :value \"x\" .
         :ob a :Obligation; :obligation_class :notify; :args (:a);
             :activation_condition [ :user <http://a.b/alice#card> ] .",
    );
    let app = format!(
        "{}\n:research-app :input_spec :second .\n:second a :InputSpec; :data <http://a.b/shoe-size>; :port [ :name \"again\" ] .",
        fixtures::RESEARCH_APP
    );
    let kb = KnowledgeBase::assemble(&graph(fixtures::RESEARCH_CONTEXT), &graph(&app), &[data]).unwrap();
    let found = check_obligations(&kb, &opts());
    let ports: Vec<&str> = found.iter().map(|o| o.input_port.as_str()).collect();
    assert_eq!(ports, ["again", "shoe-size-in"]);
}

#[test]
fn out1_drops_payment_details() {
    let kb = happy_kb();
    let derived = derive_policy(&kb, "out1-port", &opts()).unwrap();
    let p = &derived.policy;
    let names: Vec<&str> = p.attributes.values().map(|a| a.name.as_str()).collect();
    let count = |local: &str| names.iter().filter(|n| **n == v(local)).count();
    for kept in ["tag-2", "tag-3", "tag-4", "tag-5", "street", "city"] {
        assert_eq!(count(kept), 1, "{kept} should be copied");
    }
    assert_eq!(count("det"), 0);
    assert_eq!(p.attributes.len(), 6);
    // tag2-4 are bound to attr2; only the address tag survives
    assert_eq!(p.tags.len(), 1);
    assert_eq!(p.tags[0].category, TagCategory::Integrity);
    assert!(p.prohibitions.is_empty());
    assert_eq!(derived.links.len(), 6);
}

#[test]
fn no_refinements_copies_everything() {
    let app = fixtures::HAPPY_SHOP.replace("    :refinement :refine-no-payment-details.", "    .");
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(&app), &fixtures::data_graphs()).unwrap();
    let derived = derive_policy(&kb, "out1-port", &opts()).unwrap();
    let vocab = Vocab::default();
    let mut union = derived.to_data_policy(Iri::new("http://x/"));
    let c = canonical(&union, &vocab);
    let sources: Vec<_> = kb.data_policies.iter().filter(|d| d.uri.as_str() != "http://a.b/shoe-size").collect();
    let mut expected_attrs: Vec<_> = sources.iter().flat_map(|d| canonical(d, &vocab).attributes).collect();
    expected_attrs.sort();
    assert_eq!(c.attributes, expected_attrs);
    let mut expected_terms: Vec<_> = sources.iter().flat_map(|d| canonical(d, &vocab).semantic_terms()).collect();
    expected_terms.sort();
    assert_eq!(c.semantic_terms(), expected_terms);
    assert_eq!(derived.links.len(), expected_attrs.len());
    // fresh ids everywhere
    union.policy.attributes.retain(|id, _| !id.to_string().starts_with("urn:dtou:attr:"));
    assert!(union.policy.attributes.is_empty());
}

#[test]
fn edit_keeps_bound_terms() {
    let app = fixtures::HAPPY_SHOP.replace(
        ":refine-no-payment-details a :Delete;",
        ":refine-no-payment-details a :Edit; :new_class :data-content; :new_value :redacted;",
    );
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(&app), &fixtures::data_graphs()).unwrap();
    let derived = derive_policy(&kb, "out1-port", &opts()).unwrap();
    let p = &derived.policy;
    let edited: Vec<_> = p.attributes.values().filter(|a| a.name == iri("det")).collect();
    assert_eq!(edited.len(), 1);
    assert_eq!(edited[0].value, Term::iri(v("redacted")));
    assert_eq!(p.tags.len(), 4);
    assert_eq!(p.prohibitions.len(), 1);
    let bound = &edited[0].id;
    assert!(p.prohibitions[0].validity_bindings.contains(bound));
    for t in p.tags.iter().filter(|t| t.category != TagCategory::Integrity) {
        assert!(t.validity_bindings.contains(bound));
    }
}

#[test]
fn derivation_needs_covered_from_ports() {
    let data = vec![graph(fixtures::PAYMENT_INFO)];
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(fixtures::HAPPY_SHOP), &data).unwrap();
    assert_eq!(kb.uncovered_inputs, ["address-in"]);
    let err = derive_policies(&kb, &opts()).unwrap_err();
    assert_eq!(err, ReasonError::UncoveredFromPort { output: "out1-port".into(), input: "address-in".into() });
    assert!(matches!(derive_policy(&kb, "nope", &opts()), Err(ReasonError::UnknownOutput(_))));
}

#[test]
fn derived_policy_round_trips() {
    let vocab = Vocab::default();
    let derived = derive_policy(&happy_kb(), "out1-port", &opts()).unwrap();
    let set = derived.to_data_policy(Iri::new("http://a.b/purchases"));
    let text = serialize_turtle(&policy_to_graph(&set), &vocab.prefixes());
    let back = extract_data_policies(&parse_turtle(&text, None).unwrap()).unwrap();
    assert_eq!(back, vec![set]);
}

#[test]
fn subclass_capacity_needs_closure() {
    let app = fixtures::HAPPY_SHOP.replace(":security :banking;", ":security :retail-banking;");
    let vocabulary = graph(":retail-banking rdfs:subClassOf :banking .");
    let kb = KnowledgeBase::assemble(&graph(fixtures::USAGE_CONTEXT), &graph(&app), &fixtures::data_graphs())
        .unwrap()
        .with_vocabulary(&vocabulary);
    let off = check_conformance(&kb, &opts());
    assert_eq!(off.len(), 1);
    assert_eq!(off[0].kind, ConflictKind::UnsatisfiedRequirement);
    let on = check_conformance(&kb, &ReasonerOptions { rdfs_closure: true, ..opts() });
    assert!(on.is_empty(), "{on:?}");
}

#[test]
fn context_must_name_the_app() {
    let ctx = fixtures::USAGE_CONTEXT.replace(":policy :app-policy", ":policy :someone-else");
    let err =
        KnowledgeBase::assemble(&graph(&ctx), &graph(fixtures::HAPPY_SHOP), &fixtures::data_graphs()).unwrap_err();
    assert!(matches!(err, ReasonError::ContextMismatch { .. }));
}
