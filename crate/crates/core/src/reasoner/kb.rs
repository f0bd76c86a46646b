use std::collections::BTreeMap;

use crate::policy::{
    extract_app_policy_with, extract_data_policies_with, extract_usage_context_with, AppPolicy, DataPolicySet,
    UsageContext,
};
use crate::rdf::{Graph, Iri};
use crate::vocab::{default_vocab, Vocab};

use super::{ClassHierarchy, ReasonError};

/// An input spec together with one data policy whose uri it reads.
/// Both fields index into the owning [`KnowledgeBase`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    pub input: usize,
    pub policy: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Warning {
    /// Several data policies govern the same uri; all of them apply.
    DuplicateUri { uri: Iri, count: usize },
    /// An input reads data for which no policy was supplied.
    UncoveredInput { port: String, uri: Iri },
    /// These classes subclass each other and are treated as one.
    SubclassCycle { classes: Vec<Iri> },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::DuplicateUri { uri, count } => write!(f, "{count} data policies govern {uri}"),
            Warning::UncoveredInput { port, uri } => write!(f, "input \"{port}\" reads {uri}, which has no data policy"),
            Warning::SubclassCycle { classes } => {
                let names: Vec<&str> = classes.iter().map(Iri::as_str).collect();
                write!(f, "subclass cycle among {}", names.join(", "))
            }
        }
    }
}

/// Everything one reasoning request needs: the context, the app policy,
/// the data policies, and their pairings with the app's inputs.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    pub context: UsageContext,
    pub app: AppPolicy,
    pub data_policies: Vec<DataPolicySet>,
    /// Sorted by `(input, policy)`.
    pub pairings: Vec<Pairing>,
    /// Port names of inputs without any paired policy, in app order.
    pub uncovered_inputs: Vec<String>,
    pub warnings: Vec<Warning>,
    pub hierarchy: ClassHierarchy,
}

impl KnowledgeBase {
    /// Pairs inputs with data policies by uri equality.
    pub fn new(context: UsageContext, app: AppPolicy, data_policies: Vec<DataPolicySet>) -> Result<Self, ReasonError> {
        if context.app_policy != app.id && context.app_policy.as_iri() != Some(&app.name) {
            return Err(ReasonError::ContextMismatch { reference: context.app_policy.clone() });
        }
        let mut by_uri: BTreeMap<&Iri, Vec<usize>> = BTreeMap::new();
        for (i, d) in data_policies.iter().enumerate() {
            by_uri.entry(&d.uri).or_default().push(i);
        }
        let mut warnings = Vec::new();
        for (uri, idx) in &by_uri {
            if idx.len() > 1 {
                warnings.push(Warning::DuplicateUri { uri: (*uri).clone(), count: idx.len() });
            }
        }
        let mut pairings = Vec::new();
        let mut uncovered_inputs = Vec::new();
        for (i, input) in app.inputs.iter().enumerate() {
            match by_uri.get(&input.data_uri) {
                Some(idx) => pairings.extend(idx.iter().map(|&p| Pairing { input: i, policy: p })),
                None => {
                    uncovered_inputs.push(input.port_name.clone());
                    warnings.push(Warning::UncoveredInput { port: input.port_name.clone(), uri: input.data_uri.clone() });
                }
            }
        }
        Ok(KnowledgeBase {
            context,
            app,
            data_policies,
            pairings,
            uncovered_inputs,
            warnings,
            hierarchy: ClassHierarchy::default(),
        })
    }

    /// Extracts every document and pairs them. `rdfs:subClassOf` triples in
    /// any of the graphs feed the class hierarchy.
    pub fn assemble(context: &Graph, app: &Graph, data: &[Graph]) -> Result<Self, ReasonError> {
        Self::assemble_with(context, app, data, default_vocab())
    }

    pub fn assemble_with(context: &Graph, app: &Graph, data: &[Graph], vocab: &Vocab) -> Result<Self, ReasonError> {
        let ctx = extract_usage_context_with(context, vocab)?;
        let app_policy = extract_app_policy_with(app, vocab)?;
        let mut policies = Vec::new();
        for g in data {
            policies.extend(extract_data_policies_with(g, vocab)?);
        }
        let mut kb = Self::new(ctx, app_policy, policies)?;
        for g in [context, app].into_iter().chain(data) {
            kb.hierarchy.extend_from(g);
        }
        kb.refresh_cycle_warnings();
        Ok(kb)
    }

    /// Adds subclass axioms from a separate vocabulary graph.
    pub fn with_vocabulary(mut self, vocabulary: &Graph) -> Self {
        self.hierarchy.extend_from(vocabulary);
        self.refresh_cycle_warnings();
        self
    }

    fn refresh_cycle_warnings(&mut self) {
        self.warnings.retain(|w| !matches!(w, Warning::SubclassCycle { .. }));
        for classes in self.hierarchy.cycles() {
            self.warnings.push(Warning::SubclassCycle { classes });
        }
    }

    /// Policies paired with the input at `input`.
    pub fn policies_for(&self, input: usize) -> impl Iterator<Item = (usize, &DataPolicySet)> + '_ {
        self.pairings
            .iter()
            .filter(move |p| p.input == input)
            .map(|p| (p.policy, &self.data_policies[p.policy]))
    }

    pub fn input_index(&self, port: &str) -> Option<usize> {
        self.app.inputs.iter().position(|i| i.port_name == port)
    }
}
