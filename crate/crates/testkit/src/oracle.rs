//! A brute-force reference reasoner.
//!
//! It reads the raw triples of one merged graph, enumerates every variable
//! assignment of each rule body and keeps those that satisfy it. It shares
//! no code with the engine beyond the indexed graph type and vocabulary IRIs.

use std::collections::{BTreeMap, BTreeSet};

use dtou_core::rdf::ns;
use dtou_core::{Graph, Iri, Term, Vocab};

use crate::summary::{
    ConditionKey, ConflictTuple, DerivedSummary, ObligationTuple, OriginKey,
};

pub struct Oracle {
    g: Graph,
    v: Vocab,
    rdfs_closure: bool,
}

/// One `(usage, data, app, input)` assignment with the extra variables
/// the rules need.
struct Related {
    user: Option<Term>,
    app: Term,
    input: Term,
    data: Term,
}

impl Oracle {
    /// Merges all documents into one graph.
    pub fn new<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> Self {
        let mut g = Graph::new();
        for part in graphs {
            g.union(part);
        }
        Oracle { g, v: Vocab::default(), rdfs_closure: false }
    }

    pub fn with_rdfs_closure(mut self, on: bool) -> Self {
        self.rdfs_closure = on;
        self
    }

    fn p(&self, local: &str) -> Iri {
        Iri::new(format!("{}{local}", self.v.namespace()))
    }

    fn t(&self, local: &str) -> Term {
        Term::Iri(self.p(local))
    }

    fn objs(&self, s: &Term, local: &str) -> Vec<Term> {
        let p = self.p(local);
        self.g.objects(s, &p).cloned().collect()
    }

    fn has(&self, s: &Term, local: &str, o: &Term) -> bool {
        self.objs(s, local).contains(o)
    }

    fn typed(&self, class: &str) -> Vec<Term> {
        let c = self.t(class);
        let mut out: Vec<Term> = self.g.instances_of(&c).cloned().collect();
        out.sort();
        out.dedup();
        out
    }

    fn is_a(&self, s: &Term, class: &str) -> bool {
        self.g.has_type(s, &self.t(class))
    }

    /// Optional objects: an empty object set binds the variable to `None`.
    fn opt_objs(&self, s: &Term, local: &str) -> Vec<Option<Term>> {
        let o = self.objs(s, local);
        if o.is_empty() {
            vec![None]
        } else {
            o.into_iter().map(Some).collect()
        }
    }

    fn port_name(&self, holder: &Term) -> Option<String> {
        match holder {
            Term::Literal(l) => Some(l.lexical().to_owned()),
            _ => self.objs(holder, "name").into_iter().find_map(|n| n.as_literal().map(|l| l.lexical().to_owned())),
        }
    }

    fn input_port(&self, input: &Term) -> String {
        self.objs(input, "port").iter().find_map(|p| self.port_name(p)).unwrap_or_default()
    }

    fn related(&self) -> Vec<Related> {
        let mut out = Vec::new();
        for usage in self.typed("UsageContext") {
            for app_s in self.objs(&usage, "app") {
                let mut apps = self.objs(&app_s, "policy");
                if apps.is_empty() {
                    apps.push(app_s.clone());
                }
                for app in apps {
                    for input in self.objs(&app, "input_spec") {
                        for data in self.typed("Data") {
                            for uri in self.objs(&data, "uri") {
                                if self.has(&input, "data", &uri) {
                                    out.push(Related {
                                        user: self.objs(&usage, "user").into_iter().next(),
                                        app: app.clone(),
                                        input: input.clone(),
                                        data: data.clone(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn category_iri(&self, local: &str) -> Term {
        self.t(local)
    }

    /// All categories a tag node is given, by type, by `:category`, or by
    /// the predicate listing it.
    fn tag_category(&self, pol: &Term, tag: &Term) -> Option<Term> {
        for (class, cat) in [("SecurityTag", "Security"), ("IntegrityTag", "Integrity"), ("PurposeTag", "Purpose")] {
            if self.is_a(tag, class) {
                return Some(self.category_iri(cat));
            }
        }
        if let Some(c) = self.objs(tag, "category").into_iter().next() {
            return Some(c);
        }
        for (pred, cat) in [("security", "Security"), ("integrity", "Integrity"), ("purpose", "Purpose")] {
            if self.has(pol, pred, tag) {
                return Some(self.category_iri(cat));
            }
        }
        None
    }

    fn tags(&self, pol: &Term) -> Vec<Term> {
        let mut out = Vec::new();
        for pred in ["security", "integrity", "purpose", "tag"] {
            out.extend(self.objs(pol, pred));
        }
        out.sort();
        out.dedup();
        out
    }

    fn descriptors(&self, tag: &Term) -> Vec<Term> {
        self.objs(tag, "attribute_ref").iter().flat_map(|a| self.objs(a, "class")).collect()
    }

    fn is_requirement(&self, cat: &Term) -> bool {
        *cat != self.t("Integrity") && *cat != self.t("Purpose")
    }

    /// Capacities `(category, descriptor)` from shorthand and explicit forms.
    fn capacities(&self, input: &Term, short: &[(&str, &str)], explicit: &str) -> Vec<(Term, Term)> {
        let mut out = Vec::new();
        for (pred, cat) in short {
            for d in self.objs(input, pred) {
                out.push((self.t(cat), d));
            }
        }
        for node in self.objs(input, explicit) {
            for c in self.objs(&node, "category") {
                for d in self.objs(&node, "descriptor") {
                    out.push((c.clone(), d));
                }
            }
        }
        out
    }

    fn subclass_table(&self) -> BTreeSet<(Term, Term)> {
        let sub = Iri::new(ns::RDFS_SUBCLASS_OF);
        let mut table: BTreeSet<(Term, Term)> =
            self.g.iter().filter(|t| t.predicate == sub).map(|t| (t.subject.clone(), t.object.clone())).collect();
        loop {
            let snapshot: Vec<_> = table.iter().cloned().collect();
            let mut grew = false;
            for (a, b) in &snapshot {
                for (c, d) in &snapshot {
                    if b == c && table.insert((a.clone(), d.clone())) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return table;
            }
        }
    }

    pub fn conformance(&self) -> BTreeSet<ConflictTuple> {
        let table = self.subclass_table();
        let mut out = BTreeSet::new();
        let key = |t: &Term| format!("{t:?}");
        for r in self.related() {
            let port = self.input_port(&r.input);
            for pol in self.objs(&r.data, "policy") {
                // unsatisfied requirements
                for req in self.tags(&pol) {
                    let Some(cat) = self.tag_category(&pol, &req) else { continue };
                    if !self.is_requirement(&cat) {
                        continue;
                    }
                    for n in self.descriptors(&req) {
                        let provided = self
                            .capacities(&r.input, &[("security", "Security")], "provide")
                            .iter()
                            .any(|(c, d)| {
                                *c == cat && (*d == n || (self.rdfs_closure && table.contains(&(d.clone(), n.clone()))))
                            });
                        if !provided {
                            out.insert(ConflictTuple::tag("UnsatisfiedRequirement", &port, key(&cat), key(&n)));
                        }
                    }
                }
                // unmatched expectations
                let expectations =
                    self.capacities(&r.input, &[("integrity", "Integrity"), ("purpose", "Purpose")], "expect");
                for (cat, n) in expectations {
                    let found = self.tags(&pol).iter().any(|tag| {
                        self.tag_category(&pol, tag).as_ref() == Some(&cat) && self.descriptors(tag).contains(&n)
                    });
                    if !found {
                        out.insert(ConflictTuple::tag("UnmatchedExpectation", &port, key(&cat), key(&n)));
                    }
                }
                // prohibited uses
                for pro in self.objs(&pol, "prohibition") {
                    let modes = self.objs(&pro, "mode");
                    if !(modes.is_empty() || modes.contains(&self.t("Use"))) {
                        continue;
                    }
                    for ac in self.objs(&pro, "activation_condition") {
                        self.prohibited(&r, &port, &ac, &mut out);
                    }
                }
            }
        }
        out
    }

    /// Enumerates `(u, n, p)` over every candidate value and keeps the
    /// assignments satisfying one of the two disjuncts.
    fn prohibited(&self, r: &Related, port: &str, ac: &Term, out: &mut BTreeSet<ConflictTuple>) {
        let key = |t: &Option<Term>| t.as_ref().map(|t| format!("{t:?}"));
        let ac_user = self.opt_objs(ac, "user");
        let ac_app = self.opt_objs(ac, "app_name");
        let ac_purpose = self.opt_objs(ac, "purpose");
        let app_names = self.objs(&r.app, "name");
        let input_purposes = self.opt_objs(&r.input, "purpose");
        let downstreams = self.objs(&r.input, "downstream");
        // candidate domain for each variable: condition values, context values, downstream values
        let mut users: Vec<Option<Term>> = ac_user.clone();
        users.push(r.user.clone());
        let mut apps: Vec<Option<Term>> = ac_app.clone();
        apps.extend(app_names.iter().cloned().map(Some));
        let mut purposes: Vec<Option<Term>> = ac_purpose.clone();
        purposes.extend(input_purposes.iter().cloned());
        for ds in &downstreams {
            apps.extend(self.objs(ds, "app_name").into_iter().map(Some));
            purposes.extend(self.opt_objs(ds, "purpose"));
        }
        let binds = |cond: &[Option<Term>], value: &Option<Term>| -> bool {
            cond.iter().any(|c| c.is_none() || c == value)
        };
        let wild = |cond: &[Option<Term>]| cond.iter().any(Option::is_none);
        for u in &users {
            for n in &apps {
                for p in &purposes {
                    if !(binds(&ac_user, u) && binds(&ac_app, n) && binds(&ac_purpose, p)) {
                        continue;
                    }
                    let direct = u.is_some()
                        && *u == r.user
                        && n.as_ref().is_some_and(|n| app_names.contains(n))
                        && input_purposes.contains(p);
                    let via_downstream = downstreams.iter().any(|ds| {
                        // the user is not constrained on this path: it must be the condition's own
                        let user_ok = if wild(&ac_user) { u.is_none() } else { ac_user.contains(u) };
                        user_ok
                            && n.as_ref().is_some_and(|n| self.has(ds, "app_name", n))
                            && self.opt_objs(ds, "purpose").contains(p)
                    });
                    if direct || via_downstream {
                        out.insert(ConflictTuple::prohibited(port, key(u), key(n), key(p)));
                    }
                }
            }
        }
    }

    fn list(&self, head: &Term) -> Vec<Term> {
        let first = Iri::new(ns::RDF_FIRST);
        let rest = Iri::new(ns::RDF_REST);
        let nil = Term::iri(ns::RDF_NIL);
        let mut out = Vec::new();
        let mut node = head.clone();
        while node != nil {
            let f = self.g.objects(&node, &first).next().cloned();
            let r = self.g.objects(&node, &rest).next().cloned();
            match (f, r) {
                (Some(f), Some(r)) => {
                    out.push(f);
                    node = r;
                }
                _ => break,
            }
        }
        out
    }

    fn args(&self, ob: &Term) -> Vec<Term> {
        match self.objs(ob, "args").into_iter().next() {
            Some(head) => self.list(&head),
            None => Vec::new(),
        }
    }

    pub fn obligations(&self) -> BTreeSet<ObligationTuple> {
        let key = |t: &Term| format!("{t:?}");
        let mut out = BTreeSet::new();
        for r in self.related() {
            let port = self.input_port(&r.input);
            let app_names = self.objs(&r.app, "name");
            let input_purposes = self.opt_objs(&r.input, "purpose");
            for pol in self.objs(&r.data, "policy") {
                for ob in self.objs(&pol, "obligation") {
                    for class in self.objs(&ob, "obligation_class") {
                        let args: Vec<(String, String, String)> = self
                            .args(&ob)
                            .iter()
                            .map(|a| {
                                let f = |p: &str| self.objs(a, p).first().map(key).unwrap_or_default();
                                (f("name"), f("class"), f("value"))
                            })
                            .collect();
                        for ac in self.objs(&ob, "activation_condition") {
                            let fires = self.opt_objs(&ac, "user").iter().any(|u| u.is_none() || *u == r.user)
                                && self.opt_objs(&ac, "app_name").iter().any(|n| n.as_ref().is_none_or(|n| app_names.contains(n)))
                                && self.opt_objs(&ac, "purpose").iter().any(|p| p.is_none() || input_purposes.contains(p));
                            if fires {
                                out.insert(ObligationTuple { class: key(&class), args: args.clone(), port: port.clone() });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Derived summaries per output port, or the name of the first from-port
    /// without a paired data policy.
    pub fn derivation(&self) -> Result<BTreeMap<String, DerivedSummary>, String> {
        let related = self.related();
        let mut out = BTreeMap::new();
        for usage_app in related.iter().map(|r| r.app.clone()).chain(self.app_without_pairings()).collect::<BTreeSet<_>>() {
            for output in self.objs(&usage_app, "output_spec") {
                let oport = self.input_port(&output);
                let mut summary = DerivedSummary::default();
                let mut from_ports: Vec<String> = self.objs(&output, "from").iter().filter_map(|f| self.port_name(f)).collect();
                from_ports.sort();
                from_ports.dedup();
                for fport in &from_ports {
                    let pairs: Vec<&Related> =
                        related.iter().filter(|r| r.app == usage_app && self.input_port(&r.input) == *fport).collect();
                    if pairs.is_empty() {
                        return Err(fport.clone());
                    }
                    for r in pairs {
                        for pol in self.objs(&r.data, "policy") {
                            self.derive_one(&output, fport, &pol, &mut summary);
                        }
                    }
                }
                out.insert(oport, summary);
            }
        }
        Ok(out)
    }

    fn app_without_pairings(&self) -> Vec<Term> {
        let mut out = Vec::new();
        for usage in self.typed("UsageContext") {
            for app_s in self.objs(&usage, "app") {
                let mut apps = self.objs(&app_s, "policy");
                if apps.is_empty() {
                    apps.push(app_s.clone());
                }
                out.extend(apps);
            }
        }
        out
    }

    /// The fate of one attribute at an output: `None` if deleted, else its
    /// output class and value.
    fn fate(&self, output: &Term, port: &str, attr: &Term) -> Option<(Term, Term)> {
        let one = |p: &str| self.objs(attr, p).into_iter().next();
        let (name, class, value) = (one("name"), one("class"), one("value"));
        let mut matching = Vec::new();
        for refi in self.objs(output, "refinement") {
            for filter in self.objs(&refi, "filter") {
                let field_ok = |field: &str, actual: &Option<Term>| {
                    let want = self.objs(&filter, field);
                    want.is_empty() || want.iter().any(|w| Some(w) == actual.as_ref())
                };
                let input_ok = {
                    let want: Vec<String> = self.objs(&filter, "input").iter().filter_map(|i| self.port_name(i)).collect();
                    want.is_empty() || want.iter().any(|w| w == port)
                };
                if input_ok && field_ok("name", &name) && field_ok("class", &class) && field_ok("value", &value) {
                    matching.push(refi.clone());
                }
            }
        }
        if matching.iter().any(|r| self.is_a(r, "Delete")) {
            return None;
        }
        let edit = matching.iter().filter(|r| self.is_a(r, "Edit")).min();
        match edit {
            Some(r) => Some((self.objs(r, "new_class")[0].clone(), self.objs(r, "new_value")[0].clone())),
            None => Some((class?, value?)),
        }
    }

    fn derive_one(&self, output: &Term, port: &str, pol: &Term, summary: &mut DerivedSummary) {
        let key = |t: &Term| format!("{t:?}");
        let origin = |t: &Term| OriginKey { input_port: port.to_owned(), policy: key(pol), node: key(t) };
        let mut survivors = BTreeSet::new();
        for attr in self.objs(pol, "attribute") {
            if let Some((class, value)) = self.fate(output, port, &attr) {
                let name = self.objs(&attr, "name").first().map(key).unwrap_or_default();
                summary.attributes.insert((origin(&attr), name, key(&class), key(&value)));
                survivors.insert(attr);
            }
        }
        let bound = |node: &Term| -> Option<BTreeSet<OriginKey>> {
            let vbs = self.objs(node, "validity_binding");
            if vbs.iter().all(|b| survivors.contains(b)) {
                Some(vbs.iter().map(origin).collect())
            } else {
                None
            }
        };
        let condition = |node: &Term| -> ConditionKey {
            let ac = self.objs(node, "activation_condition").into_iter().next();
            let f = |p: &str| ac.as_ref().and_then(|ac| self.objs(ac, p).first().map(key));
            (f("user"), f("app_name"), f("purpose"))
        };
        for tag in self.tags(pol) {
            let Some(ar) = self.objs(&tag, "attribute_ref").into_iter().next() else { continue };
            if !survivors.contains(&ar) {
                continue;
            }
            if let (Some(bindings), Some(cat)) = (bound(&tag), self.tag_category(pol, &tag)) {
                summary.tags.push((key(&cat), origin(&ar), bindings));
            }
        }
        for pr in self.objs(pol, "prohibition") {
            if let Some(bindings) = bound(&pr) {
                summary.prohibitions.push((condition(&pr), bindings));
            }
        }
        for ob in self.objs(pol, "obligation") {
            let args = self.args(&ob);
            if !args.iter().all(|a| survivors.contains(a)) {
                continue;
            }
            if let Some(bindings) = bound(&ob) {
                let class = self.objs(&ob, "obligation_class").first().map(key).unwrap_or_default();
                summary.obligations.push((class, args.iter().map(origin).collect(), condition(&ob), bindings));
            }
        }
        summary.normalise();
    }
}
