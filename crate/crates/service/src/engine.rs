//! The three reasoning tasks over stored policies, without any HTTP.

use std::collections::BTreeSet;
use std::sync::Arc;

use dtou_core::policy::{extract_app_policy_with, policy_to_graph_with, usage_context_to_graph_with, UsageContext};
use dtou_core::rdf::Literal;
use dtou_core::reasoner::{check_conformance, check_obligations, derive_policy};
use dtou_core::report::{ConformanceReport, ObligationReport};
use dtou_core::{parse_turtle, serialize_turtle, Graph, Iri, KnowledgeBase, ReasonError, ReasonerOptions, Term, Vocab};
use dtou_store::{Provenance, Store, StoreError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Deny usage when an input has no stored policy.
    pub strict: bool,
    /// Upper bound on request bodies, in bytes.
    pub max_document_bytes: usize,
    pub reasoner: ReasonerOptions,
    /// Extra `rdfs:subClassOf` axioms, e.g. the obligation audience classes.
    pub vocabulary: Option<Graph>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { strict: false, max_document_bytes: 1 << 20, reasoner: ReasonerOptions::default(), vocabulary: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterResponse {
    pub registration_id: String,
}

/// Body of the conformance and obligation requests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRequest {
    pub registration_id: String,
    pub user: String,
    pub time: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationRequest {
    pub registration_id: String,
    pub output_port: String,
    pub target_uri: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeriveResponse {
    pub stored_uri: String,
    pub policy: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    /// Strict mode refused a request because inputs lack policies.
    #[error("inputs without a stored policy: {}", .uncovered.join(", "))]
    Uncovered { uncovered: Vec<String>, report: serde_json::Value },
    #[error("{0}")]
    Unprocessable(String),
    #[error("{0}")]
    Internal(String),
}

impl From<StoreError> for ServiceError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io(_) | StoreError::Manifest(_) | StoreError::Version(_) => ServiceError::Internal(e.to_string()),
            other => ServiceError::BadRequest(other.to_string()),
        }
    }
}

/// Stateless apart from the store; safe to share across request handlers.
#[derive(Debug)]
pub struct Engine {
    store: Arc<Store>,
    config: ServiceConfig,
}

impl Engine {
    pub fn new(store: Arc<Store>, config: ServiceConfig) -> Self {
        Engine { store, config }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    fn vocab(&self) -> &Vocab {
        &self.store.config().vocab
    }

    pub fn register_app(&self, document: &str) -> Result<RegisterResponse, ServiceError> {
        if document.trim().is_empty() {
            return Err(ServiceError::BadRequest("empty app policy document".into()));
        }
        let reg = self.store.register_app(document)?;
        Ok(RegisterResponse { registration_id: reg.registration_id })
    }

    /// Builds the knowledge base for one usage of a registered app: the
    /// context from the request and one stored policy per input uri.
    pub fn knowledge_base(&self, req: &ContextRequest) -> Result<KnowledgeBase, ServiceError> {
        let reg = self
            .store
            .get_app(&req.registration_id)
            .ok_or_else(|| ServiceError::NotFound(format!("no registration {}", req.registration_id)))?;
        if !Iri::is_absolute(&req.user) {
            return Err(ServiceError::BadRequest(format!("user must be an absolute IRI, got {:?}", req.user)));
        }
        let vocab = self.vocab();
        let internal = |e: &dyn std::fmt::Display| ServiceError::Internal(format!("stored document unreadable: {e}"));
        let app_graph = parse_turtle(&reg.app_policy_document, None).map_err(|e| internal(&e))?;
        let app = extract_app_policy_with(&app_graph, vocab).map_err(|e| internal(&e))?;
        let context = UsageContext {
            id: Term::iri(format!("urn:dtou:context:{}", req.registration_id)),
            user: Iri::new(&req.user),
            app_policy: app.id.clone(),
            time: Literal::string(&req.time),
        };
        let context_graph = usage_context_to_graph_with(&context, vocab);
        let uris: BTreeSet<&str> = app.inputs.iter().map(|i| i.data_uri.as_str()).collect();
        let mut data = Vec::new();
        for uri in uris {
            if let Some(rec) = self.store.get_policy(uri) {
                data.push(parse_turtle(&rec.policy_document, None).map_err(|e| internal(&e))?);
            }
        }
        let kb = KnowledgeBase::assemble_with(&context_graph, &app_graph, &data, vocab).map_err(|e| internal(&e))?;
        Ok(match &self.config.vocabulary {
            Some(v) => kb.with_vocabulary(v),
            None => kb,
        })
    }

    fn refuse_uncovered(&self, kb: &KnowledgeBase, report: impl Serialize) -> Result<(), ServiceError> {
        if self.config.strict && !kb.uncovered_inputs.is_empty() {
            return Err(ServiceError::Uncovered {
                uncovered: kb.uncovered_inputs.clone(),
                report: serde_json::to_value(report).map_err(|e| ServiceError::Internal(e.to_string()))?,
            });
        }
        Ok(())
    }

    pub fn conformance(&self, req: &ContextRequest) -> Result<ConformanceReport, ServiceError> {
        let kb = self.knowledge_base(req)?;
        let conflicts = check_conformance(&kb, &self.config.reasoner);
        let report = ConformanceReport::new(&kb, &conflicts, self.config.strict, self.vocab());
        self.refuse_uncovered(&kb, &report)?;
        Ok(report)
    }

    pub fn obligations(&self, req: &ContextRequest) -> Result<ObligationReport, ServiceError> {
        let kb = self.knowledge_base(req)?;
        let obligations = check_obligations(&kb, &self.config.reasoner);
        let report = ObligationReport::new(&kb, &obligations, self.vocab());
        self.refuse_uncovered(&kb, &report)?;
        Ok(report)
    }

    /// Derives the policy of one output, binds it to `target_uri` and stores it.
    pub fn derive(&self, req: &DerivationRequest) -> Result<DeriveResponse, ServiceError> {
        if !Iri::is_absolute(&req.target_uri) {
            return Err(ServiceError::BadRequest(format!("target_uri must be an absolute IRI, got {:?}", req.target_uri)));
        }
        // derivation does not depend on who uses the app
        let ctx = ContextRequest {
            registration_id: req.registration_id.clone(),
            user: "urn:dtou:derivation".into(),
            time: String::new(),
        };
        let kb = self.knowledge_base(&ctx)?;
        let derived = derive_policy(&kb, &req.output_port, &self.config.reasoner).map_err(|e| match e {
            ReasonError::UnknownOutput(_) | ReasonError::UncoveredFromPort { .. } => {
                ServiceError::Unprocessable(e.to_string())
            }
            other => ServiceError::Internal(other.to_string()),
        })?;
        let vocab = self.vocab();
        let set = derived.to_data_policy(Iri::new(&req.target_uri));
        let document = serialize_turtle(&policy_to_graph_with(&set, vocab), &vocab.prefixes());
        let provenance = Provenance { app_name: kb.app.name.to_string(), output_port: req.output_port.clone() };
        self.store.put_derived_policy(&req.target_uri, &document, provenance)?;
        Ok(DeriveResponse { stored_uri: req.target_uri.clone(), policy: document })
    }

    pub fn policy_document(&self, uri: &str) -> Option<String> {
        self.store.get_policy(uri).map(|r| r.policy_document)
    }
}
