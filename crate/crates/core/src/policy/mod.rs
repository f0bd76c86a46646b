//! Typed data and app policies, bound from and encoded to graphs.

mod encode;
mod extract;
mod model;

pub use encode::*;
pub use extract::*;
pub use model::*;

use crate::rdf::{Term, TurtleError};

/// Structural problems found while binding a graph to the policy model.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("{node}: missing `{field}`")]
    Missing { node: Term, field: &'static str },
    #[error("{node}: `{field}` given {found} times, expected once")]
    Multiple { node: Term, field: &'static str, found: usize },
    #[error("{node}: `{field}` must be {expected}")]
    WrongKind { node: Term, field: &'static str, expected: &'static str },
    #[error("{node}: `{field}` refers to unknown {target}")]
    Dangling { node: Term, field: &'static str, target: Term },
    #[error("expected exactly one {class}, found {found}")]
    Cardinality { class: &'static str, found: usize },
    #[error("duplicate {kind} port name \"{port}\"")]
    DuplicatePort { port: String, kind: &'static str },
    #[error("{node}: {msg}")]
    Invalid { node: Term, msg: String },
    #[error(transparent)]
    Syntax(#[from] TurtleError),
}
