use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::{ns, Graph, Iri, Term, Triple};

/// Transitive `rdfs:subClassOf` relation over IRIs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassHierarchy {
    /// Strict superclasses of each class, transitively closed.
    supers: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl ClassHierarchy {
    pub fn from_graph(g: &Graph) -> Self {
        let mut h = ClassHierarchy::default();
        h.extend_from(g);
        h
    }

    pub fn extend_from(&mut self, g: &Graph) {
        let sub = Iri::new(ns::RDFS_SUBCLASS_OF);
        let mut changed = false;
        for t in g.matching(None, Some(&sub), None) {
            if let (Term::Iri(a), Term::Iri(b)) = (&t.subject, &t.object) {
                changed |= self.supers.entry(a.clone()).or_default().insert(b.clone());
            }
        }
        if changed {
            self.close();
        }
    }

    fn close(&mut self) {
        loop {
            let mut added = Vec::new();
            for (a, direct) in &self.supers {
                for b in direct {
                    for c in self.supers.get(b).into_iter().flatten() {
                        if !direct.contains(c) {
                            added.push((a.clone(), c.clone()));
                        }
                    }
                }
            }
            if added.is_empty() {
                return;
            }
            for (a, c) in added {
                self.supers.entry(a).or_default().insert(c);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.supers.is_empty()
    }

    /// `sub ⊑ sup`, reflexively.
    pub fn is_subclass(&self, sub: &Iri, sup: &Iri) -> bool {
        sub == sup || self.supers.get(sub).is_some_and(|s| s.contains(sup))
    }

    pub fn superclasses(&self, class: &Iri) -> impl Iterator<Item = &Iri> + '_ {
        self.supers.get(class).into_iter().flatten()
    }

    /// Groups of mutually-subclassed IRIs, each sorted; these classes are
    /// treated as equivalent.
    pub fn cycles(&self) -> Vec<Vec<Iri>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, sups) in &self.supers {
            if !sups.contains(a) || seen.contains(a) {
                continue;
            }
            let mut group: Vec<Iri> = sups.iter().filter(|b| self.is_subclass(b, a)).cloned().collect();
            if !group.contains(a) {
                group.push(a.clone());
            }
            group.sort();
            seen.extend(group.iter().cloned());
            out.push(group);
        }
        out
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Iri, &Iri)> + '_ {
        self.supers.iter().flat_map(|(a, s)| s.iter().map(move |b| (a, b)))
    }
}

/// Materialises the transitive closure of `rdfs:subClassOf` in a copy of `g`.
/// Reflexive triples are only present if they follow from a cycle.
pub fn rdfs_closure(g: &Graph) -> Graph {
    let h = ClassHierarchy::from_graph(g);
    let mut out = g.clone();
    let sub = Iri::new(ns::RDFS_SUBCLASS_OF);
    for (a, b) in h.pairs() {
        out.insert(Triple::new(a.clone(), sub.clone(), b.clone()));
    }
    out
}
