//! The policy vocabulary: every class and property IRI the policy model reads
//! or writes, resolved against a configurable namespace.

use std::sync::LazyLock;

use crate::rdf::{ns, Iri, Term};

/// Namespace bound to the empty prefix `:` in policy documents.
pub const DEFAULT_NAMESPACE: &str = "https://w3id.org/dtou/vocab#";

macro_rules! vocab {
    ($($field:ident => $local:literal),* $(,)?) => {
        /// Vocabulary IRIs under one namespace.
        #[derive(Debug, Clone)]
        pub struct Vocab {
            namespace: String,
            $(pub $field: Iri,)*
        }

        impl Vocab {
            pub fn new(namespace: impl Into<String>) -> Self {
                let namespace = namespace.into();
                Vocab {
                    $($field: Iri::new(format!("{namespace}{}", $local)),)*
                    namespace,
                }
            }
        }
    };
}

vocab! {
    // classes
    data_class => "Data",
    policy_class => "Policy",
    attribute_class => "Attribute",
    tag_class => "Tag",
    security_tag => "SecurityTag",
    integrity_tag => "IntegrityTag",
    purpose_tag => "PurposeTag",
    prohibition_class => "Prohibition",
    obligation_class_type => "Obligation",
    app_policy_class => "AppPolicy",
    input_spec_class => "InputSpec",
    output_spec_class => "OutputSpec",
    delete => "Delete",
    edit => "Edit",
    usage_context => "UsageContext",
    app_info => "AppInfo",
    user_obligation => "UserObligation",
    process_obligation => "ProcessObligation",
    // tag categories
    security => "Security",
    integrity => "Integrity",
    purpose_category => "Purpose",
    // individuals
    use_mode => "Use",
    nil => "nil",
    // data policy properties
    uri => "uri",
    policy => "policy",
    attribute => "attribute",
    name => "name",
    class => "class",
    value => "value",
    security_p => "security",
    integrity_p => "integrity",
    purpose => "purpose",
    tag => "tag",
    category => "category",
    descriptor => "descriptor",
    attribute_ref => "attribute_ref",
    validity_binding => "validity_binding",
    prohibition => "prohibition",
    obligation => "obligation",
    mode => "mode",
    activation_condition => "activation_condition",
    user => "user",
    app_name => "app_name",
    obligation_class => "obligation_class",
    args => "args",
    // app policy properties
    input_spec => "input_spec",
    output_spec => "output_spec",
    data => "data",
    port => "port",
    downstream => "downstream",
    provide => "provide",
    expect => "expect",
    from => "from",
    refinement => "refinement",
    filter => "filter",
    input => "input",
    new_class => "new_class",
    new_value => "new_value",
    // usage context properties
    app => "app",
    time => "time",
}

impl Vocab {
    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn term(&self, iri: &Iri) -> Term {
        Term::Iri(iri.clone())
    }

    pub fn rdf_type(&self) -> Iri {
        Iri::new(ns::RDF_TYPE)
    }

    /// Prefix map for writing documents in this vocabulary.
    pub fn prefixes(&self) -> Vec<(String, String)> {
        let mut p = crate::rdf::default_prefixes();
        p[0].1 = self.namespace.clone();
        p
    }
}

impl Default for Vocab {
    fn default() -> Self {
        DEFAULT.clone()
    }
}

static DEFAULT: LazyLock<Vocab> = LazyLock::new(|| Vocab::new(DEFAULT_NAMESPACE));

/// The vocabulary under [`DEFAULT_NAMESPACE`].
pub fn default_vocab() -> &'static Vocab {
    &DEFAULT
}
