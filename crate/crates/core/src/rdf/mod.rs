//! RDF terms, an indexed triple store, and the Turtle subset policies are written in.

mod graph;
mod iso;
pub mod ns;
mod term;
mod turtle;
mod write;

pub use graph::Graph;
pub use term::{BlankId, Iri, Literal, Term, Triple};
pub use turtle::{parse_turtle, TurtleError, TurtleErrorKind, TurtleParser};
pub use write::{default_prefixes, serialize_turtle, Prefixes};
