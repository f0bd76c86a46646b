use std::collections::{HashMap, HashSet};

use indexmap::IndexSet;

use super::ns;
use super::term::{BlankId, Iri, Term, Triple};

/// A set of triples with subject, predicate and subject–predicate indexes.
///
/// Insertion order is preserved for iteration; duplicates are ignored.
#[derive(Clone, Default)]
pub struct Graph {
    triples: IndexSet<Triple>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Iri, Vec<usize>>,
    by_subject_predicate: HashMap<(Term, Iri), Vec<usize>>,
    blanks: HashSet<BlankId>,
    next_blank: u64,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Inserts a triple, returning `false` if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        for term in [&triple.subject, &triple.object] {
            if let Term::Blank(b) = term {
                self.blanks.insert(b.clone());
            }
        }
        let idx = self.triples.len();
        self.by_subject.entry(triple.subject.clone()).or_default().push(idx);
        self.by_predicate.entry(triple.predicate.clone()).or_default().push(idx);
        self.by_subject_predicate
            .entry((triple.subject.clone(), triple.predicate.clone()))
            .or_default()
            .push(idx);
        self.triples.insert(triple);
        true
    }

    pub fn add(&mut self, subject: impl Into<Term>, predicate: impl Into<Iri>, object: impl Into<Term>) {
        self.insert(Triple::new(subject, predicate, object));
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    /// All triples matching the pattern; `None` components are wildcards.
    pub fn matching<'a>(
        &'a self,
        subject: Option<&'a Term>,
        predicate: Option<&'a Iri>,
        object: Option<&'a Term>,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        let keep = move |t: &&Triple| object.is_none_or(|o| &t.object == o);
        match (subject, predicate) {
            (Some(s), Some(p)) => {
                let key = (s.clone(), p.clone());
                let idxs = self.by_subject_predicate.get(&key).map(Vec::as_slice).unwrap_or(&[]);
                Box::new(idxs.iter().map(move |&i| &self.triples[i]).filter(keep))
            }
            (Some(s), None) => {
                let idxs = self.by_subject.get(s).map(Vec::as_slice).unwrap_or(&[]);
                Box::new(idxs.iter().map(move |&i| &self.triples[i]).filter(keep))
            }
            (None, Some(p)) => {
                let idxs = self.by_predicate.get(p).map(Vec::as_slice).unwrap_or(&[]);
                Box::new(idxs.iter().map(move |&i| &self.triples[i]).filter(keep))
            }
            (None, None) => Box::new(self.triples.iter().filter(keep)),
        }
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &Term, predicate: &Iri) -> impl Iterator<Item = &'a Term> + 'a {
        let key = (subject.clone(), predicate.clone());
        let idxs = self.by_subject_predicate.get(&key).map(Vec::as_slice).unwrap_or(&[]);
        idxs.iter().map(move |&i| &self.triples[i].object)
    }

    /// Subjects typed `rdf:type class`, in insertion order.
    pub fn instances_of<'a>(&'a self, class: &'a Term) -> impl Iterator<Item = &'a Term> + 'a {
        let rdf_type = Iri::new(ns::RDF_TYPE);
        let idxs = self.by_predicate.get(&rdf_type).map(Vec::as_slice).unwrap_or(&[]);
        idxs.iter()
            .map(move |&i| &self.triples[i])
            .filter(move |t| &t.object == class)
            .map(|t| &t.subject)
    }

    pub fn has_type(&self, subject: &Term, class: &Term) -> bool {
        self.contains(&Triple::new(subject, Iri::new(ns::RDF_TYPE), class))
    }

    /// Every distinct subject, in first-insertion order.
    pub fn subjects(&self) -> impl Iterator<Item = &Term> + '_ {
        let mut seen = HashSet::new();
        self.triples.iter().map(|t| &t.subject).filter(move |s| seen.insert(*s))
    }

    /// A blank node label not yet used in this graph.
    pub fn fresh_blank(&mut self) -> Term {
        loop {
            let id = BlankId::new(format!("b{}", self.next_blank));
            self.next_blank += 1;
            if self.blanks.insert(id.clone()) {
                return Term::Blank(id);
            }
        }
    }

    /// Adds every triple of `other`, relabelling its blank nodes so they cannot
    /// collide with blank nodes already in `self`.
    pub fn union(&mut self, other: &Graph) {
        let mut renamed: HashMap<&BlankId, Term> = HashMap::new();
        for t in other.iter() {
            let s = self.rename(&mut renamed, &t.subject);
            let o = self.rename(&mut renamed, &t.object);
            self.insert(Triple { subject: s, predicate: t.predicate.clone(), object: o });
        }
    }

    fn rename<'o>(&mut self, renamed: &mut HashMap<&'o BlankId, Term>, term: &'o Term) -> Term {
        match term {
            Term::Blank(b) => {
                if let Some(t) = renamed.get(b) {
                    return t.clone();
                }
                let fresh = self.fresh_blank();
                renamed.insert(b, fresh.clone());
                fresh
            }
            other => other.clone(),
        }
    }

    /// Decodes the RDF collection starting at `head`. Returns `None` when the
    /// `rdf:first`/`rdf:rest` chain is malformed or cyclic.
    pub fn collection(&self, head: &Term) -> Option<Vec<Term>> {
        let first = Iri::new(ns::RDF_FIRST);
        let rest = Iri::new(ns::RDF_REST);
        let nil = Term::iri(ns::RDF_NIL);
        let mut items = Vec::new();
        let mut node = head.clone();
        let mut visited = HashSet::new();
        while node != nil {
            if !visited.insert(node.clone()) {
                return None;
            }
            let mut firsts = self.objects(&node, &first);
            let item = firsts.next()?.clone();
            if firsts.next().is_some() {
                return None;
            }
            let mut rests = self.objects(&node, &rest);
            let next = rests.next()?.clone();
            if rests.next().is_some() {
                return None;
            }
            items.push(item);
            node = next;
        }
        Some(items)
    }

    /// Encodes `items` as an RDF collection and returns its head (`rdf:nil` when empty).
    pub fn insert_collection(&mut self, items: &[Term]) -> Term {
        let first = Iri::new(ns::RDF_FIRST);
        let rest = Iri::new(ns::RDF_REST);
        let mut next = Term::iri(ns::RDF_NIL);
        for item in items.iter().rev() {
            let node = self.fresh_blank();
            self.add(node.clone(), first.clone(), item.clone());
            self.add(node.clone(), rest.clone(), next);
            next = node;
        }
        next
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.triples.iter()).finish()
    }
}

impl PartialEq for Graph {
    /// Exact set equality (blank labels must agree); see [`Graph::is_isomorphic`]
    /// for equality up to blank renaming.
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|t| other.contains(t))
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        for t in iter {
            g.insert(t);
        }
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}
