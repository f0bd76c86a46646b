//! Seeded random knowledge bases written as Turtle.
//!
//! Pools of names, classes and values are kept small so that filters,
//! descriptors and conditions collide often. Every node that the oracle
//! keys on is a named IRI; blank nodes appear only where the model has no
//! id (conditions, ports, filters, downstreams, capacities).

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Turtle sources for one knowledge base.
#[derive(Debug, Clone)]
pub struct RandomKb {
    pub context: String,
    pub app: String,
    pub data: Vec<String>,
    /// `rdfs:subClassOf` axioms over the class pool.
    pub vocabulary: String,
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Upper bound for each kind of term in one policy.
    pub max_terms: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    pub max_data: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_terms: 10, max_inputs: 4, max_outputs: 3, max_data: 4 }
    }
}

const NAMES: &[&str] = &[":n0", ":n1", ":n2", ":n3"];
const CLASSES: &[&str] = &[":c0", ":c1", ":c2", ":c3", ":p0", ":p1", ":p2"];
const PURPOSES: &[&str] = &[":p0", ":p1", ":p2"];
const VALUES: &[&str] = &[":v0", ":v1", ":nil", "\"l0\"", "\"l1\"", "\"7\"^^xsd:integer"];
const USERS: &[&str] = &[":u0", ":u1"];
const APPS: &[&str] = &["<http://app.example/>", "<http://ds0.example/>", "<http://ds1.example/>"];
const OBLIGATIONS: &[&str] = &[":ob0", ":ob1", ":notify"];
const APP_NAME: &str = "<http://app.example/>";

fn uri(i: usize) -> String {
    format!("<http://data.example/r{i}>")
}

pub fn random_kb(seed: u64) -> RandomKb {
    random_kb_with(seed, Limits::default())
}

pub fn random_kb_with(seed: u64, limits: Limits) -> RandomKb {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), limits };
    let n_data = g.rng.gen_range(1..=limits.max_data);
    let data = (0..n_data).map(|k| g.data_policy(k)).collect();
    RandomKb { context: g.context(), app: g.app(), data, vocabulary: g.vocabulary() }
}

struct Gen {
    rng: ChaCha8Rng,
    limits: Limits,
}

impl Gen {
    fn pick<'a>(&mut self, pool: &[&'a str]) -> &'a str {
        pool.choose(&mut self.rng).unwrap()
    }

    fn count(&mut self) -> usize {
        // skew towards small counts but reach the bound
        let max = self.limits.max_terms;
        if self.rng.gen_bool(0.2) {
            max
        } else {
            self.rng.gen_range(0..=max.min(4))
        }
    }

    fn subset<T: Clone>(&mut self, items: &[T], max: usize) -> Vec<T> {
        let n = self.rng.gen_range(0..=max.min(items.len()));
        items.choose_multiple(&mut self.rng, n).cloned().collect()
    }

    fn condition(&mut self) -> String {
        loop {
            let mut parts = Vec::new();
            if self.rng.gen_bool(0.4) {
                parts.push(format!(":user {}", self.pick(USERS)));
            }
            if self.rng.gen_bool(0.5) {
                parts.push(format!(":app_name {}", self.pick(APPS)));
            }
            if self.rng.gen_bool(0.5) {
                parts.push(format!(":purpose {}", self.pick(PURPOSES)));
            }
            if !parts.is_empty() {
                return format!("[ {} ]", parts.join("; "));
            }
        }
    }

    fn bindings(&mut self, out: &mut String, node: &str, attrs: &[String]) {
        for b in self.subset(attrs, 2) {
            writeln!(out, "{node} :validity_binding {b} .").unwrap();
        }
    }

    fn data_policy(&mut self, k: usize) -> String {
        let mut out = String::new();
        let pol = format!(":pol{k}");
        let u = if self.rng.gen_bool(0.9) { self.rng.gen_range(0..4) } else { 0 };
        writeln!(out, ":data{k} a :Data; :uri {}; :policy {pol} .", uri(u)).unwrap();
        writeln!(out, "{pol} a :Policy .").unwrap();

        let attrs: Vec<String> = (0..self.count()).map(|i| format!(":k{k}a{i}")).collect();
        for a in &attrs {
            let (n, c, v) = (self.pick(NAMES), self.pick(CLASSES), self.pick(VALUES));
            writeln!(out, "{pol} :attribute {a} .\n{a} a :Attribute; :name {n}; :class {c}; :value {v} .").unwrap();
        }
        if attrs.is_empty() {
            // prohibitions without bindings still fire
            for j in 0..self.count() {
                let cond = self.condition();
                writeln!(out, "{pol} :prohibition :k{k}r{j} .\n:k{k}r{j} a :Prohibition; :activation_condition {cond} .").unwrap();
            }
            return out;
        }

        for j in 0..self.count() {
            let tag = format!(":k{k}t{j}");
            let ar = attrs.choose(&mut self.rng).unwrap().clone();
            match self.rng.gen_range(0..7) {
                // typed and listed under the category predicate
                0 => writeln!(out, "{pol} :security {tag} .\n{tag} a :SecurityTag .").unwrap(),
                1 => writeln!(out, "{pol} :integrity {tag} .\n{tag} a :IntegrityTag .").unwrap(),
                2 => writeln!(out, "{pol} :purpose {tag} .\n{tag} a :PurposeTag .").unwrap(),
                // category from the predicate only
                3 => writeln!(out, "{pol} :security {tag} .").unwrap(),
                4 => writeln!(out, "{pol} :purpose {tag} .").unwrap(),
                // generic listing
                5 => writeln!(out, "{pol} :tag {tag} .\n{tag} a :IntegrityTag .").unwrap(),
                _ => writeln!(out, "{pol} :tag {tag} .\n{tag} a :Tag; :category :cat-x .").unwrap(),
            }
            writeln!(out, "{tag} :attribute_ref {ar} .").unwrap();
            self.bindings(&mut out, &tag, &attrs);
        }
        for j in 0..self.count() {
            let pr = format!(":k{k}r{j}");
            let mode = if self.rng.gen_bool(0.5) { " :mode :Use;" } else { "" };
            let cond = self.condition();
            writeln!(out, "{pol} :prohibition {pr} .\n{pr} a :Prohibition;{mode} :activation_condition {cond} .").unwrap();
            self.bindings(&mut out, &pr, &attrs);
        }
        for j in 0..self.count() {
            let ob = format!(":k{k}o{j}");
            let class = self.pick(OBLIGATIONS);
            let cond = self.condition();
            let n_args = self.rng.gen_range(0..=2);
            let args: Vec<String> = (0..n_args).map(|_| attrs.choose(&mut self.rng).unwrap().clone()).collect();
            let args = if args.is_empty() && self.rng.gen_bool(0.5) {
                String::new()
            } else {
                format!(" :args ({});", args.join(" "))
            };
            writeln!(out, "{pol} :obligation {ob} .\n{ob} a :Obligation; :obligation_class {class};{args} :activation_condition {cond} .")
                .unwrap();
            self.bindings(&mut out, &ob, &attrs);
        }
        out
    }

    fn app(&mut self) -> String {
        let mut out = String::new();
        writeln!(out, ":app a :AppPolicy; :name {APP_NAME} .").unwrap();
        let n_inputs = self.rng.gen_range(0..=self.limits.max_inputs);
        let ports: Vec<String> = (0..n_inputs).map(|i| format!("in{i}")).collect();
        for (i, port) in ports.iter().enumerate() {
            let input = format!(":in{i}");
            let u = if self.rng.gen_bool(0.9) { self.rng.gen_range(0..4) } else { 4 };
            writeln!(out, ":app :input_spec {input} .\n{input} a :InputSpec; :data {}; :port [ :name \"{port}\" ] .", uri(u))
                .unwrap();
            for _ in 0..self.rng.gen_range(0..=3) {
                let d = self.pick(CLASSES);
                match self.rng.gen_range(0..3) {
                    0 | 1 => writeln!(out, "{input} :security {d} .").unwrap(),
                    _ => writeln!(out, "{input} :provide [ :category :cat-x; :descriptor {d} ] .").unwrap(),
                }
            }
            for _ in 0..self.rng.gen_range(0..=2) {
                let d = self.pick(CLASSES);
                match self.rng.gen_range(0..3) {
                    0 => writeln!(out, "{input} :integrity {d} .").unwrap(),
                    1 => writeln!(out, "{input} :expect [ :category :Integrity; :descriptor {d} ] .").unwrap(),
                    _ => writeln!(out, "{input} :expect [ :category :cat-x; :descriptor {d} ] .").unwrap(),
                }
            }
            for p in self.subset(PURPOSES, 2) {
                writeln!(out, "{input} :purpose {p} .").unwrap();
            }
            for _ in 0..self.rng.gen_range(0..=2) {
                let mut parts = vec![format!(":app_name {}", self.pick(APPS))];
                if self.rng.gen_bool(0.3) {
                    parts.push(format!(":user {}", self.pick(USERS)));
                }
                if self.rng.gen_bool(0.6) {
                    parts.push(format!(":purpose {}", self.pick(PURPOSES)));
                }
                writeln!(out, "{input} :downstream [ {} ] .", parts.join("; ")).unwrap();
            }
        }
        for j in 0..self.rng.gen_range(0..=self.limits.max_outputs) {
            let output = format!(":out{j}");
            writeln!(out, ":app :output_spec {output} .\n{output} a :OutputSpec; :port [ :name \"out{j}\" ] .").unwrap();
            let from = self.subset(&ports, ports.len());
            for f in &from {
                writeln!(out, "{output} :from [ :name \"{f}\" ] .").unwrap();
            }
            for m in 0..self.rng.gen_range(0..=3) {
                let r = format!(":out{j}r{m}");
                if self.rng.gen_bool(0.5) {
                    writeln!(out, "{r} a :Delete .").unwrap();
                } else {
                    let (c, v) = (self.pick(CLASSES), self.pick(VALUES));
                    writeln!(out, "{r} a :Edit; :new_class {c}; :new_value {v} .").unwrap();
                }
                let mut parts = Vec::new();
                while parts.is_empty() {
                    if !ports.is_empty() && self.rng.gen_bool(0.3) {
                        let p = ports.choose(&mut self.rng).unwrap();
                        parts.push(format!(":input [ :name \"{p}\" ]"));
                    }
                    if self.rng.gen_bool(0.4) {
                        parts.push(format!(":name {}", self.pick(NAMES)));
                    }
                    if self.rng.gen_bool(0.5) {
                        parts.push(format!(":class {}", self.pick(CLASSES)));
                    }
                    if self.rng.gen_bool(0.4) {
                        parts.push(format!(":value {}", self.pick(VALUES)));
                    }
                }
                writeln!(out, "{output} :refinement {r} .\n{r} :filter [ {} ] .", parts.join("; ")).unwrap();
            }
        }
        out
    }

    fn context(&mut self) -> String {
        let user = self.pick(USERS);
        format!(":ctx a :UsageContext; :user {user}; :app [ a :AppInfo; :policy :app ]; :time \"2024-01-01\" .\n")
    }

    fn vocabulary(&mut self) -> String {
        let mut out = String::new();
        for _ in 0..self.rng.gen_range(0..=3) {
            let (a, b) = (self.pick(CLASSES), self.pick(CLASSES));
            if a != b {
                writeln!(out, "{a} rdfs:subClassOf {b} .").unwrap();
            }
        }
        out
    }
}
