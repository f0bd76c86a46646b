//! JSON-ready views of reasoning results. IRIs are rendered as absolute
//! strings; the top-level `schema_version` changes only on breaking edits.

use serde::Serialize;

use crate::policy::TagCategory;
use crate::reasoner::{ActivatedObligation, Conflict, KnowledgeBase};
use crate::rdf::{Iri, Term};
use crate::vocab::Vocab;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TermView {
    Iri { value: String },
    Blank { value: String },
    Literal {
        value: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        datatype: Option<String>,
    },
}

impl From<&Term> for TermView {
    fn from(t: &Term) -> Self {
        match t {
            Term::Iri(i) => TermView::Iri { value: i.to_string() },
            Term::Blank(b) => TermView::Blank { value: b.as_str().to_owned() },
            Term::Literal(l) => TermView::Literal {
                value: l.lexical().to_owned(),
                datatype: l.datatype().map(|d| d.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextView {
    pub user: String,
    pub app_name: String,
    /// Carried through unevaluated.
    pub time: String,
}

impl ContextView {
    pub fn new(kb: &KnowledgeBase) -> Self {
        ContextView {
            user: kb.context.user.to_string(),
            app_name: kb.app.name.to_string(),
            time: kb.context.time.lexical().to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConflictView {
    pub kind: &'static str,
    pub input_port: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub app_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purpose: Option<String>,
}

fn s(i: &Option<Iri>) -> Option<String> {
    i.as_ref().map(Iri::to_string)
}

impl ConflictView {
    pub fn new(c: &Conflict, vocab: &Vocab) -> Self {
        ConflictView {
            kind: c.kind.as_str(),
            input_port: c.input_port.clone(),
            category: c.category.as_ref().map(|cat: &TagCategory| cat.iri(vocab).to_string()),
            descriptor: s(&c.descriptor),
            mode: c.mode.map(|_| vocab.use_mode.to_string()),
            user: s(&c.user),
            app_name: s(&c.app_name),
            purpose: s(&c.purpose),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformanceReport {
    pub schema_version: u32,
    pub permitted: bool,
    pub context: ContextView,
    pub conflicts: Vec<ConflictView>,
    pub uncovered_inputs: Vec<String>,
    pub warnings: Vec<String>,
}

impl ConformanceReport {
    /// In strict mode an uncovered input denies the usage.
    pub fn new(kb: &KnowledgeBase, conflicts: &[Conflict], strict: bool, vocab: &Vocab) -> Self {
        ConformanceReport {
            schema_version: SCHEMA_VERSION,
            permitted: conflicts.is_empty() && !(strict && !kb.uncovered_inputs.is_empty()),
            context: ContextView::new(kb),
            conflicts: conflicts.iter().map(|c| ConflictView::new(c, vocab)).collect(),
            uncovered_inputs: kb.uncovered_inputs.clone(),
            warnings: kb.warnings.iter().map(ToString::to_string).collect(),
        }
    }
}

/// Who an obligation is addressed to, from its class hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Audience {
    User,
    Process,
    Unspecified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArgView {
    pub name: String,
    pub class: String,
    pub value: TermView,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObligationView {
    pub obligation_class: String,
    pub audience: Audience,
    pub input_port: String,
    pub args: Vec<ArgView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObligationReport {
    pub schema_version: u32,
    pub context: ContextView,
    pub obligations: Vec<ObligationView>,
    pub warnings: Vec<String>,
}

impl ObligationReport {
    pub fn new(kb: &KnowledgeBase, obligations: &[ActivatedObligation], vocab: &Vocab) -> Self {
        let audience = |class: &Iri| {
            if kb.hierarchy.is_subclass(class, &vocab.user_obligation) {
                Audience::User
            } else if kb.hierarchy.is_subclass(class, &vocab.process_obligation) {
                Audience::Process
            } else {
                Audience::Unspecified
            }
        };
        ObligationReport {
            schema_version: SCHEMA_VERSION,
            context: ContextView::new(kb),
            obligations: obligations
                .iter()
                .map(|o| ObligationView {
                    obligation_class: o.obligation_class.to_string(),
                    audience: audience(&o.obligation_class),
                    input_port: o.input_port.clone(),
                    args: o
                        .arg_values
                        .iter()
                        .map(|a| ArgView { name: a.name.to_string(), class: a.class.to_string(), value: (&a.value).into() })
                        .collect(),
                })
                .collect(),
            warnings: kb.warnings.iter().map(ToString::to_string).collect(),
        }
    }
}
