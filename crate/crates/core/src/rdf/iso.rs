//! Graph isomorphism up to blank node relabelling.
//!
//! Blank nodes are first coloured by iterated neighbourhood hashing, then a
//! backtracking search maps colour classes onto each other. Policy graphs
//! only have small blank neighbourhoods (conditions, ports, filters, list
//! cells), so the search rarely branches.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::graph::Graph;
use super::term::{Term, Triple};

impl Graph {
    /// `true` when some bijection between blank nodes makes the graphs equal.
    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let ground_a: HashSet<&Triple> = self.iter().filter(|t| is_ground(t)).collect();
        let ground_b: HashSet<&Triple> = other.iter().filter(|t| is_ground(t)).collect();
        if ground_a != ground_b {
            return false;
        }
        let colours_a = colour(self);
        let colours_b = colour(other);
        let mut hist_a: BTreeMap<u64, usize> = BTreeMap::new();
        let mut hist_b: BTreeMap<u64, usize> = BTreeMap::new();
        for c in colours_a.values() {
            *hist_a.entry(*c).or_default() += 1;
        }
        for c in colours_b.values() {
            *hist_b.entry(*c).or_default() += 1;
        }
        if hist_a != hist_b {
            return false;
        }
        let mut order: Vec<&Term> = colours_a.keys().copied().collect();
        // rarest colours first to prune early
        order.sort_by_key(|b| (hist_a[&colours_a[*b]], *b));
        let mut candidates: HashMap<u64, Vec<&Term>> = HashMap::new();
        for (b, c) in &colours_b {
            candidates.entry(*c).or_default().push(b);
        }
        let blank_triples = |g: &Graph| -> Vec<Triple> { g.iter().filter(|t| !is_ground(t)).cloned().collect() };
        let search = Search {
            a_triples: blank_triples(self),
            other,
            order,
            colours_a: &colours_a,
            candidates: &candidates,
        };
        let mut mapping = HashMap::new();
        let mut used = HashSet::new();
        search.assign(0, &mut mapping, &mut used)
    }
}

fn is_ground(t: &Triple) -> bool {
    !t.subject.is_blank() && !t.object.is_blank()
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

/// Refines blank node colours until the number of classes stops growing.
fn colour(g: &Graph) -> HashMap<&Term, u64> {
    let mut colours: HashMap<&Term, u64> = HashMap::new();
    for t in g.iter() {
        for term in [&t.subject, &t.object] {
            if term.is_blank() {
                colours.insert(term, 0);
            }
        }
    }
    let mut classes = 1;
    for _ in 0..=colours.len() {
        let mut next: HashMap<&Term, u64> = HashMap::new();
        for (&node, &c) in &colours {
            let mut sig: Vec<(u8, &str, u64)> = Vec::new();
            for t in g.matching(Some(node), None, None) {
                sig.push((0, t.predicate.as_str(), term_colour(&t.object, &colours)));
            }
            sig.sort();
            let mut incoming: Vec<(u8, &str, u64)> = g
                .iter()
                .filter(|t| &t.object == node)
                .map(|t| (1, t.predicate.as_str(), term_colour(&t.subject, &colours)))
                .collect();
            incoming.sort();
            sig.extend(incoming);
            next.insert(node, hash_of(&(c, sig)));
        }
        let n = next.values().collect::<HashSet<_>>().len();
        colours = next;
        if n == classes {
            break;
        }
        classes = n;
    }
    colours
}

fn term_colour(t: &Term, colours: &HashMap<&Term, u64>) -> u64 {
    match t {
        Term::Blank(_) => colours[t].wrapping_add(1),
        other => hash_of(other),
    }
}

struct Search<'a> {
    a_triples: Vec<Triple>,
    other: &'a Graph,
    order: Vec<&'a Term>,
    colours_a: &'a HashMap<&'a Term, u64>,
    candidates: &'a HashMap<u64, Vec<&'a Term>>,
}

impl<'a> Search<'a> {
    fn assign(&self, i: usize, mapping: &mut HashMap<&'a Term, &'a Term>, used: &mut HashSet<&'a Term>) -> bool {
        if i == self.order.len() {
            return self.a_triples.iter().all(|t| self.other.contains(&self.map(t, mapping).unwrap()));
        }
        let node = self.order[i];
        let Some(cands) = self.candidates.get(&self.colours_a[node]) else {
            return false;
        };
        for &cand in cands {
            if used.contains(cand) {
                continue;
            }
            mapping.insert(node, cand);
            used.insert(cand);
            if self.consistent(node, mapping) && self.assign(i + 1, mapping, used) {
                return true;
            }
            mapping.remove(node);
            used.remove(cand);
        }
        false
    }

    /// Checks every triple touching `node` whose blanks are all mapped.
    fn consistent(&self, node: &Term, mapping: &HashMap<&'a Term, &'a Term>) -> bool {
        self.a_triples
            .iter()
            .filter(|t| &t.subject == node || &t.object == node)
            .filter_map(|t| self.map(t, mapping))
            .all(|t| self.other.contains(&t))
    }

    fn map(&self, t: &Triple, mapping: &HashMap<&'a Term, &'a Term>) -> Option<Triple> {
        let m = |term: &Term| -> Option<Term> {
            if term.is_blank() {
                mapping.get(term).map(|t| (*t).clone())
            } else {
                Some(term.clone())
            }
        };
        Some(Triple { subject: m(&t.subject)?, predicate: t.predicate.clone(), object: m(&t.object)? })
    }
}

#[cfg(test)]
mod tests {
    use crate::rdf::{parse_turtle, Graph, Iri, Term};

    fn g(text: &str) -> Graph {
        parse_turtle(text, None).unwrap()
    }

    #[test]
    fn relabelled_blank_nodes_are_isomorphic() {
        let a = g("_:x :p _:y . _:y :q \"1\" . _:x :r :z .");
        let b = g("_:k :r :z . _:m :q \"1\" . _:k :p _:m .");
        assert!(a.is_isomorphic(&b));
        assert!(b.is_isomorphic(&a));
    }

    #[test]
    fn hand_permuted_symmetric_structure() {
        // two interchangeable blanks plus one distinguished by a literal
        let a = g("_:a :p _:b . _:b :p _:c . _:c :p _:a . _:a :v \"x\" .");
        let b = g("_:3 :p _:1 . _:1 :p _:2 . _:2 :p _:3 . _:2 :v \"x\" .");
        assert!(a.is_isomorphic(&b));
        let c = g("_:3 :p _:1 . _:1 :p _:2 . _:2 :p _:3 . _:2 :v \"y\" .");
        assert!(!a.is_isomorphic(&c));
    }

    #[test]
    fn direction_matters() {
        let a = g("_:a :p _:b . _:b :p _:c .");
        let b = g("_:a :p _:b . _:c :p _:b .");
        assert!(!a.is_isomorphic(&b));
    }

    #[test]
    fn ground_difference_detected() {
        assert!(!g(":a :p :b .").is_isomorphic(&g(":a :p :c .")));
        assert!(g("").is_isomorphic(&Graph::new()));
    }

    #[test]
    fn regular_graphs_need_search() {
        // a 6-cycle vs two 3-cycles: every node has the same local signature
        let six = g("_:1 :p _:2 . _:2 :p _:3 . _:3 :p _:4 . _:4 :p _:5 . _:5 :p _:6 . _:6 :p _:1 .");
        let two = g("_:1 :p _:2 . _:2 :p _:3 . _:3 :p _:1 . _:4 :p _:5 . _:5 :p _:6 . _:6 :p _:4 .");
        assert!(!six.is_isomorphic(&two));
        let six_b = g("_:a :p _:c . _:c :p _:e . _:e :p _:b . _:b :p _:d . _:d :p _:f . _:f :p _:a .");
        assert!(six.is_isomorphic(&six_b));
    }

    #[test]
    fn blank_vs_iri_not_isomorphic() {
        let mut a = Graph::new();
        a.add(Term::blank("x"), Iri::new("http://p"), Term::iri("http://o"));
        let mut b = Graph::new();
        b.add(Term::iri("http://s"), Iri::new("http://p"), Term::iri("http://o"));
        assert!(!a.is_isomorphic(&b));
    }
}
