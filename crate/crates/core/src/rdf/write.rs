//! Deterministic Turtle serialization.
//!
//! Blank nodes referenced exactly once are written inline as `[ ... ]`, well
//! formed collections as `( ... )`; every other blank node gets a fresh
//! `_:bN` label. Output is sorted so equal graphs serialize byte-identically.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use super::graph::Graph;
use super::ns;
use super::term::{BlankId, Iri, Literal, Term, Triple};

/// `(prefix, namespace)` pairs as written in `@prefix` lines.
pub type Prefixes = [(String, String)];

/// The prefixes policy documents are written with.
pub fn default_prefixes() -> Vec<(String, String)> {
    vec![
        (String::new(), crate::vocab::DEFAULT_NAMESPACE.to_owned()),
        ("rdf".to_owned(), ns::RDF.to_owned()),
        ("rdfs".to_owned(), ns::RDFS.to_owned()),
        ("xsd".to_owned(), ns::XSD.to_owned()),
    ]
}

pub fn serialize_turtle(graph: &Graph, prefixes: &Prefixes) -> String {
    Writer::new(graph, prefixes).write()
}

enum Shape {
    /// Written inline as a property list.
    Inline,
    /// Written inline as a collection of these items.
    List(Vec<Term>),
}

struct Writer<'g> {
    graph: &'g Graph,
    prefixes: Vec<(String, String)>,
    by_subject: BTreeMap<&'g Term, Vec<&'g Triple>>,
    shapes: HashMap<&'g Term, Shape>,
    labels: HashMap<BlankId, String>,
}

impl<'g> Writer<'g> {
    fn new(graph: &'g Graph, prefixes: &Prefixes) -> Self {
        let mut by_subject: BTreeMap<&Term, Vec<&Triple>> = BTreeMap::new();
        for t in graph.iter() {
            by_subject.entry(&t.subject).or_default().push(t);
        }
        for triples in by_subject.values_mut() {
            triples.sort_by(|a, b| predicate_key(a).cmp(&predicate_key(b)).then_with(|| a.object.cmp(&b.object)));
        }
        let mut prefixes = prefixes.to_vec();
        // longest namespace first so compaction picks the most specific prefix
        prefixes.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(&b.0)));
        let mut w = Writer { graph, prefixes, by_subject, shapes: HashMap::new(), labels: HashMap::new() };
        w.plan();
        w
    }

    fn plan(&mut self) {
        let mut refs: HashMap<&Term, usize> = HashMap::new();
        for t in self.graph.iter() {
            if t.object.is_blank() {
                *refs.entry(&t.object).or_default() += 1;
            }
        }
        let once = |t: &Term| refs.get(t).copied() == Some(1);

        // collections: every chain node blank, referenced once, carrying only first/rest
        let first = Iri::new(ns::RDF_FIRST);
        let rest = Iri::new(ns::RDF_REST);
        let mut list_internal: HashSet<&Term> = HashSet::new();
        for (&subject, triples) in &self.by_subject {
            if !subject.is_blank() || !once(subject) || list_internal.contains(subject) {
                continue;
            }
            if let Some((items, chain)) = self.list_chain(subject, triples, &first, &rest, &once) {
                list_internal.extend(chain.into_iter().skip(1));
                self.shapes.insert(subject, Shape::List(items));
            }
        }
        for (&subject, _) in &self.by_subject {
            if subject.is_blank() && once(subject) && !self.shapes.contains_key(subject) && !list_internal.contains(subject) {
                self.shapes.insert(subject, Shape::Inline);
            }
        }
        // blank objects with no triples of their own, referenced once: `[]`
        for t in self.graph.iter() {
            if t.object.is_blank() && once(&t.object) && !self.by_subject.contains_key(&t.object) {
                self.shapes.insert(&t.object, Shape::Inline);
            }
        }
        for node in &list_internal {
            self.shapes.remove(node);
        }

        // inline nodes on a cycle are unreachable from any root; label them
        loop {
            let mut reached: HashSet<&Term> = HashSet::new();
            let mut stack: Vec<&Term> = self
                .by_subject
                .keys()
                .copied()
                .filter(|s| !self.shapes.contains_key(s) && !list_internal.contains(s))
                .collect();
            while let Some(node) = stack.pop() {
                for child in self.children(node) {
                    if self.shapes.contains_key(child) && reached.insert(child) {
                        stack.push(child);
                    }
                }
            }
            let orphan = self
                .shapes
                .keys()
                .copied()
                .filter(|n| !reached.contains(n))
                .min();
            match orphan {
                Some(n) => {
                    if let Some(Shape::List(_)) = self.shapes.remove(n) {
                        // fall back to plain triples for the whole chain
                        let mut node = n.clone();
                        while let Some(next) = self.graph.objects(&node, &rest).next().cloned() {
                            if let Some(t) = self.by_subject.keys().find(|k| ***k == next) {
                                list_internal.remove(*t);
                            }
                            node = next;
                        }
                    }
                }
                None => break,
            }
        }
        self.list_internal_fixup(&list_internal);
    }

    fn list_internal_fixup(&mut self, list_internal: &HashSet<&'g Term>) {
        // list-internal nodes are never written as subjects
        let internal: Vec<&Term> = list_internal.iter().copied().collect();
        for node in internal {
            self.by_subject.remove(node);
        }
    }

    fn list_chain(
        &self,
        head: &'g Term,
        head_triples: &[&'g Triple],
        first: &Iri,
        rest: &Iri,
        once: &dyn Fn(&Term) -> bool,
    ) -> Option<(Vec<Term>, Vec<&'g Term>)> {
        let nil = Term::iri(ns::RDF_NIL);
        let mut items = Vec::new();
        let mut chain = Vec::new();
        let mut node = head;
        let mut triples = head_triples;
        let mut visited = HashSet::new();
        loop {
            if !node.is_blank() || !visited.insert(node) || triples.len() != 2 {
                return None;
            }
            if node != head && !once(node) {
                return None;
            }
            let f = triples.iter().find(|t| &t.predicate == first)?;
            let r = triples.iter().find(|t| &t.predicate == rest)?;
            items.push(f.object.clone());
            chain.push(node);
            if r.object == nil {
                return Some((items, chain));
            }
            node = &r.object;
            triples = self.by_subject.get(node)?;
        }
    }

    fn children(&self, node: &'g Term) -> Vec<&'g Term> {
        match self.shapes.get(node) {
            Some(Shape::List(items)) => {
                // items are owned clones; map back to graph terms
                items
                    .iter()
                    .filter_map(|i| self.shapes.get_key_value(i).map(|(k, _)| *k))
                    .collect()
            }
            _ => self
                .by_subject
                .get(node)
                .map(|ts| ts.iter().map(|t| &t.object).filter(|o| o.is_blank()).collect())
                .unwrap_or_default(),
        }
    }

    fn write(mut self) -> String {
        let mut out = String::new();
        let mut decls: Vec<&(String, String)> = self.prefixes.iter().collect();
        decls.sort_by(|a, b| a.0.cmp(&b.0));
        for (p, ns) in decls {
            let _ = writeln!(out, "@prefix {p}: <{ns}> .");
        }
        let roots: Vec<&Term> = self.by_subject.keys().copied().filter(|s| !self.shapes.contains_key(s)).collect();
        let mut first = true;
        for subject in roots {
            out.push('\n');
            if first {
                first = false;
            }
            let s = self.term(subject);
            out.push_str(&s);
            let triples = self.by_subject[subject].clone();
            for (i, t) in triples.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { " ;\n    " });
                let p = self.predicate(&t.predicate);
                let o = self.term(&t.object);
                let _ = write!(out, "{p} {o}");
            }
            out.push_str(" .\n");
        }
        out
    }

    fn predicate(&self, p: &Iri) -> String {
        if p.as_str() == ns::RDF_TYPE {
            "a".to_owned()
        } else {
            self.iri(p)
        }
    }

    fn term(&mut self, term: &Term) -> String {
        match term {
            Term::Iri(i) if i.as_str() == ns::RDF_NIL => "()".to_owned(),
            Term::Iri(i) => self.iri(i),
            Term::Literal(l) => self.literal(l),
            Term::Blank(b) => match self.shapes.get(term) {
                Some(Shape::List(items)) => {
                    let items = items.clone();
                    let parts: Vec<String> = items.iter().map(|i| self.term(i)).collect();
                    if parts.is_empty() {
                        "()".to_owned()
                    } else {
                        format!("( {} )", parts.join(" "))
                    }
                }
                Some(Shape::Inline) => {
                    let triples = self.by_subject.get(term).cloned().unwrap_or_default();
                    if triples.is_empty() {
                        return "[]".to_owned();
                    }
                    let parts: Vec<String> = triples
                        .iter()
                        .map(|t| {
                            let p = self.predicate(&t.predicate);
                            let o = self.term(&t.object);
                            format!("{p} {o}")
                        })
                        .collect();
                    format!("[ {} ]", parts.join(" ; "))
                }
                None => {
                    let n = self.labels.len();
                    let label = self.labels.entry(b.clone()).or_insert_with(|| format!("b{n}"));
                    format!("_:{label}")
                }
            },
        }
    }

    fn iri(&self, iri: &Iri) -> String {
        let s = iri.as_str();
        for (prefix, ns) in &self.prefixes {
            if let Some(local) = s.strip_prefix(ns.as_str()) {
                if is_safe_local(local) {
                    return format!("{prefix}:{local}");
                }
            }
        }
        let mut out = String::with_capacity(s.len() + 2);
        out.push('<');
        for c in s.chars() {
            match c {
                '>' | '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                    let _ = write!(out, "\\u{:04X}", c as u32);
                }
                c if c.is_whitespace() || c.is_control() => {
                    let _ = write!(out, "\\u{:04X}", c as u32);
                }
                c => out.push(c),
            }
        }
        out.push('>');
        out
    }

    fn literal(&self, lit: &Literal) -> String {
        let mut out = String::with_capacity(lit.lexical().len() + 2);
        out.push('"');
        for c in lit.lexical().chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\r' => out.push_str("\\r"),
                '\t' => out.push_str("\\t"),
                c if c.is_control() => {
                    let _ = write!(out, "\\u{:04X}", c as u32);
                }
                c => out.push(c),
            }
        }
        out.push('"');
        if let Some(dt) = lit.datatype() {
            out.push_str("^^");
            out.push_str(&self.iri(dt));
        }
        out
    }
}

fn predicate_key(t: &Triple) -> (bool, &str) {
    (t.predicate.as_str() != ns::RDF_TYPE, t.predicate.as_str())
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        _ => false,
    }
}
