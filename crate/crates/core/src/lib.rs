//! Data-terms-of-use policies: a Turtle subset, a typed policy model, and a
//! reasoner for conformance, obligation and derivation tasks.

pub mod policy;
pub mod rdf;
pub mod reasoner;
pub mod report;
pub mod vocab;

pub use policy::PolicyError;
pub use rdf::{parse_turtle, serialize_turtle, Graph, Iri, Term};
pub use reasoner::{KnowledgeBase, ReasonError, ReasonerOptions};
pub use vocab::{default_vocab, Vocab};
