//! Seeded synthetic policies parameterised by term counts.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use dtou_core::{parse_turtle, Graph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const APP_NAME: &str = "http://bench.example/app";
pub const USER: &str = "http://bench.example/alice";
pub const INPUTS: usize = 4;

/// The quantity a workload varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variable {
    #[serde(rename = "data:numAttributes")]
    DataAttributes,
    #[serde(rename = "data:tag:numSecurity")]
    DataSecurity,
    #[serde(rename = "data:tag:numIntegrity")]
    DataIntegrity,
    #[serde(rename = "data:tag:numPurpose")]
    DataPurpose,
    #[serde(rename = "data:numProhibition")]
    DataProhibitions,
    #[serde(rename = "data:numObligation")]
    DataObligations,
    #[serde(rename = "app:numData")]
    AppData,
    #[serde(rename = "app:numSecurity")]
    AppSecurity,
    #[serde(rename = "app:numIntegrity")]
    AppIntegrity,
    #[serde(rename = "app:numPurpose")]
    AppPurpose,
    #[serde(rename = "app:output:numOutput")]
    Outputs,
    #[serde(rename = "app:output:numDelete")]
    Deletes,
    #[serde(rename = "app:output:numEdit")]
    Edits,
}

impl Variable {
    pub const ALL: [Variable; 13] = [
        Variable::DataAttributes,
        Variable::DataSecurity,
        Variable::DataIntegrity,
        Variable::DataPurpose,
        Variable::DataProhibitions,
        Variable::DataObligations,
        Variable::AppData,
        Variable::AppSecurity,
        Variable::AppIntegrity,
        Variable::AppPurpose,
        Variable::Outputs,
        Variable::Deletes,
        Variable::Edits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::DataAttributes => "data:numAttributes",
            Variable::DataSecurity => "data:tag:numSecurity",
            Variable::DataIntegrity => "data:tag:numIntegrity",
            Variable::DataPurpose => "data:tag:numPurpose",
            Variable::DataProhibitions => "data:numProhibition",
            Variable::DataObligations => "data:numObligation",
            Variable::AppData => "app:numData",
            Variable::AppSecurity => "app:numSecurity",
            Variable::AppIntegrity => "app:numIntegrity",
            Variable::AppPurpose => "app:numPurpose",
            Variable::Outputs => "app:output:numOutput",
            Variable::Deletes => "app:output:numDelete",
            Variable::Edits => "app:output:numEdit",
        }
    }

    /// Variables added to fill the grid beyond the originally studied set.
    pub fn is_extension(self) -> bool {
        matches!(
            self,
            Variable::DataAttributes
                | Variable::DataIntegrity
                | Variable::DataPurpose
                | Variable::DataProhibitions
                | Variable::DataObligations
                | Variable::Edits
        )
    }

    /// Output variables must survive the largest values without running out of memory.
    pub fn is_output(self) -> bool {
        matches!(self, Variable::Outputs | Variable::Deletes | Variable::Edits)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown variable {0:?}")]
pub struct UnknownVariable(pub String);

impl FromStr for Variable {
    type Err = UnknownVariable;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variable::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| UnknownVariable(s.to_owned()))
    }
}

/// Term counts of one workload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub attributes: usize,
    pub security: usize,
    pub integrity: usize,
    pub purpose: usize,
    pub prohibitions: usize,
    pub obligations: usize,
    /// Data policies, spread over the four input uris.
    pub data: usize,
    pub app_security: usize,
    pub app_integrity: usize,
    pub app_purpose: usize,
    pub outputs: usize,
    pub deletes: usize,
    pub edits: usize,
}

impl Default for Counts {
    fn default() -> Self {
        Counts {
            attributes: 100,
            security: 10,
            integrity: 10,
            purpose: 10,
            prohibitions: 10,
            obligations: 10,
            data: 10,
            app_security: 10,
            app_integrity: 10,
            app_purpose: 10,
            outputs: 10,
            deletes: 10,
            edits: 10,
        }
    }
}

impl Counts {
    pub fn with(mut self, variable: Variable, value: usize) -> Self {
        *match variable {
            Variable::DataAttributes => &mut self.attributes,
            Variable::DataSecurity => &mut self.security,
            Variable::DataIntegrity => &mut self.integrity,
            Variable::DataPurpose => &mut self.purpose,
            Variable::DataProhibitions => &mut self.prohibitions,
            Variable::DataObligations => &mut self.obligations,
            Variable::AppData => &mut self.data,
            Variable::AppSecurity => &mut self.app_security,
            Variable::AppIntegrity => &mut self.app_integrity,
            Variable::AppPurpose => &mut self.app_purpose,
            Variable::Outputs => &mut self.outputs,
            Variable::Deletes => &mut self.deletes,
            Variable::Edits => &mut self.edits,
        } = value;
        self
    }

    /// Size of the class vocabulary attributes draw from.
    fn vocabulary(&self) -> usize {
        [self.security, self.integrity, self.purpose, self.app_security, self.app_integrity, self.app_purpose, 10]
            .into_iter()
            .max()
            .unwrap_or(10)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub variable: Variable,
    pub values: Vec<usize>,
    pub defaults: Counts,
    pub repeats: usize,
    pub seed: u64,
    /// Probability that an app descriptor occurs in the data vocabulary.
    pub overlap: f64,
}

impl WorkloadSpec {
    pub fn new(variable: Variable, values: Vec<usize>) -> Self {
        WorkloadSpec { variable, values, defaults: Counts::default(), repeats: 10, seed: 0, overlap: 0.5 }
    }

    pub fn counts(&self, value: usize) -> Counts {
        self.defaults.with(self.variable, value)
    }
}

/// Turtle documents for one workload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedPolicies {
    pub data: Vec<String>,
    pub app: String,
    pub context: String,
}

/// Parsed forms of [`GeneratedPolicies`].
#[derive(Debug, Clone)]
pub struct WorkloadGraphs {
    pub data: Vec<Graph>,
    pub app: Graph,
    pub context: Graph,
}

impl GeneratedPolicies {
    pub fn parse(&self) -> Result<WorkloadGraphs, dtou_core::rdf::TurtleError> {
        Ok(WorkloadGraphs {
            data: self.data.iter().map(|d| parse_turtle(d, None)).collect::<Result<_, _>>()?,
            app: parse_turtle(&self.app, None)?,
            context: parse_turtle(&self.context, None)?,
        })
    }
}

pub fn data_uri(input: usize) -> String {
    format!("http://bench.example/data/{input}")
}

/// Deterministic in `(spec, value, seed)`.
pub fn generate_policies(spec: &WorkloadSpec, value: usize, seed: u64) -> GeneratedPolicies {
    let counts = spec.counts(value);
    let mixed = seed ^ (value as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(mixed), counts, overlap: spec.overlap.clamp(0.01, 1.0) };
    let data = (0..counts.data).map(|k| g.data_policy(k)).collect();
    GeneratedPolicies { data, app: g.app(), context: context() }
}

fn context() -> String {
    format!(":ctx a :UsageContext; :user <{USER}>; :app [ a :AppInfo; :policy :app ]; :time \"2024-01-01\" .\n")
}

struct Gen {
    rng: ChaCha8Rng,
    counts: Counts,
    overlap: f64,
}

impl Gen {
    fn class(&mut self) -> String {
        format!(":cls{}", self.rng.gen_range(0..self.counts.vocabulary()))
    }

    /// A class that lies in the data vocabulary with probability `overlap`.
    fn app_class(&mut self) -> String {
        let size = (self.counts.vocabulary() as f64 / self.overlap).ceil() as usize;
        format!(":cls{}", self.rng.gen_range(0..size.max(1)))
    }

    fn condition(&mut self) -> String {
        let mut parts = Vec::new();
        while parts.is_empty() {
            if self.rng.gen_bool(0.2) {
                parts.push(format!(":user <{USER}>"));
            }
            if self.rng.gen_bool(0.5) {
                let app = if self.rng.gen_bool(0.5) { APP_NAME } else { "http://bench.example/other" };
                parts.push(format!(":app_name <{app}>"));
            }
            if self.rng.gen_bool(0.5) {
                let p = self.class();
                parts.push(format!(":purpose {p}"));
            }
        }
        format!("[ {} ]", parts.join("; "))
    }

    fn attr<'a>(&mut self, attrs: &'a [String]) -> &'a str {
        attrs.choose(&mut self.rng).expect("attribute pool is non-empty")
    }

    fn bindings(&mut self, out: &mut String, node: &str, attrs: &[String]) {
        for _ in 0..self.rng.gen_range(0..=2) {
            let b = self.attr(attrs);
            writeln!(out, "{node} :validity_binding {b} .").unwrap();
        }
    }

    fn data_policy(&mut self, k: usize) -> String {
        let c = self.counts;
        let mut out = String::new();
        writeln!(out, ":data{k} a :Data; :uri <{}>; :policy :pol{k} .\n:pol{k} a :Policy .", data_uri(k % INPUTS)).unwrap();
        // every term needs an attribute to point at
        let attrs: Vec<String> = (0..c.attributes.max(1)).map(|i| format!(":d{k}a{i}")).collect();
        for (i, a) in attrs.iter().enumerate() {
            let class = self.class();
            writeln!(out, ":pol{k} :attribute {a} .\n{a} a :Attribute; :name :n{}; :class {class}; :value \"v{i}\" .", i % 10)
                .unwrap();
        }
        for (pred, class, n) in [(":security", ":SecurityTag", c.security), (":integrity", ":IntegrityTag", c.integrity), (":purpose", ":PurposeTag", c.purpose)] {
            for j in 0..n {
                let tag = format!(":d{k}{}{j}", &pred[1..4]);
                let a = self.attr(&attrs);
                writeln!(out, ":pol{k} {pred} {tag} .\n{tag} a {class}; :attribute_ref {a} .").unwrap();
                self.bindings(&mut out, &tag, &attrs);
            }
        }
        for j in 0..c.prohibitions {
            let cond = self.condition();
            writeln!(out, ":pol{k} :prohibition :d{k}pr{j} .\n:d{k}pr{j} a :Prohibition; :mode :Use; :activation_condition {cond} .").unwrap();
            self.bindings(&mut out, &format!(":d{k}pr{j}"), &attrs);
        }
        for j in 0..c.obligations {
            let cond = self.condition();
            let args: Vec<&str> = (0..self.rng.gen_range(1..=2)).map(|_| self.attr(&attrs)).collect();
            writeln!(
                out,
                ":pol{k} :obligation :d{k}ob{j} .\n:d{k}ob{j} a :Obligation; :obligation_class :obl{}; :args ({}); :activation_condition {cond} .",
                j % 3,
                args.join(" ")
            )
            .unwrap();
            self.bindings(&mut out, &format!(":d{k}ob{j}"), &attrs);
        }
        out
    }

    fn app(&mut self) -> String {
        let c = self.counts;
        let mut out = format!(":app a :AppPolicy; :name <{APP_NAME}> .\n");
        for i in 0..INPUTS {
            writeln!(out, ":app :input_spec :in{i} .\n:in{i} a :InputSpec; :data <{}>; :port [ :name \"in{i}\" ] .", data_uri(i))
                .unwrap();
            for (pred, n) in [(":security", c.app_security), (":integrity", c.app_integrity), (":purpose", c.app_purpose)] {
                for _ in 0..n {
                    let d = self.app_class();
                    writeln!(out, ":in{i} {pred} {d} .").unwrap();
                }
            }
            if self.rng.gen_bool(0.5) {
                let d = self.class();
                writeln!(out, ":in{i} :downstream [ :app_name <http://bench.example/other>; :purpose {d} ] .").unwrap();
            }
        }
        for j in 0..c.outputs {
            writeln!(out, ":app :output_spec :out{j} .\n:out{j} a :OutputSpec; :port [ :name \"out{j}\" ] .").unwrap();
            for i in 0..INPUTS {
                writeln!(out, ":out{j} :from [ :name \"in{i}\" ] .").unwrap();
            }
            for m in 0..c.deletes {
                let class = self.class();
                writeln!(out, ":out{j} :refinement :out{j}del{m} .\n:out{j}del{m} a :Delete; :filter [ :class {class} ] .").unwrap();
            }
            for m in 0..c.edits {
                let (class, new_class) = (self.class(), self.class());
                writeln!(
                    out,
                    ":out{j} :refinement :out{j}ed{m} .\n:out{j}ed{m} a :Edit; :new_class {new_class}; :new_value \"edited\"; :filter [ :class {class}; :name :n{} ] .",
                    m % 10
                )
                .unwrap();
            }
        }
        out
    }
}
