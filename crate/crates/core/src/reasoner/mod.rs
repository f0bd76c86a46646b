//! The three reasoning tasks over an assembled knowledge base.
//!
//! Every rule is a join over the typed policy structures. Positive facts
//! (pairings, forward links) are computed first; rules with negated subgoals
//! only ever look at those completed sets, so the result does not depend on
//! evaluation order.

mod closure;
mod conformance;
mod derive;
mod kb;
mod obligations;

pub use closure::{rdfs_closure, ClassHierarchy};
pub use conformance::{check_conformance, Conflict, ConflictKind};
pub use derive::{derive_policies, derive_policy, DerivedPolicy, ForwardLink};
pub use kb::{KnowledgeBase, Pairing, Warning};
pub use obligations::{check_obligations, ActivatedObligation, ArgValue};

use crate::policy::PolicyError;
use crate::rdf::Term;

/// Iteration order of rule bodies. Results are identical for both; the
/// reversed order exists to check that claim.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EvalOrder {
    #[default]
    Forward,
    Reversed,
}

/// Without the `parallel` feature, `Parallel` runs sequentially.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Parallelism {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReasonerOptions {
    /// Let a provided subclass satisfy a required descriptor.
    pub rdfs_closure: bool,
    pub order: EvalOrder,
    pub parallelism: Parallelism,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReasonError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("usage context refers to {reference}, which is not the supplied app policy")]
    ContextMismatch { reference: Term },
    #[error("no output port \"{0}\"")]
    UnknownOutput(String),
    #[error("output \"{output}\" reads input \"{input}\", which has no data policy")]
    UncoveredFromPort { output: String, input: String },
}

/// Runs `f` on each item and concatenates the results in item order.
pub(crate) fn flat_map<T, R, F>(items: &[T], opts: &ReasonerOptions, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Vec<R> + Sync + Send,
{
    let run = |items: &mut dyn Iterator<Item = &T>| -> Vec<R> { items.flat_map(&f).collect() };
    match opts.parallelism {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => {
            use rayon::prelude::*;
            match opts.order {
                EvalOrder::Forward => items.par_iter().flat_map_iter(&f).collect(),
                EvalOrder::Reversed => items.par_iter().rev().flat_map_iter(&f).collect(),
            }
        }
        _ => match opts.order {
            EvalOrder::Forward => run(&mut items.iter()),
            EvalOrder::Reversed => run(&mut items.iter().rev()),
        },
    }
}

/// Applies the evaluation order to an inner rule-body loop.
pub(crate) fn ordered<'a, T>(items: &'a [T], opts: &ReasonerOptions) -> Box<dyn Iterator<Item = &'a T> + 'a> {
    match opts.order {
        EvalOrder::Forward => Box::new(items.iter()),
        EvalOrder::Reversed => Box::new(items.iter().rev()),
    }
}
