//! Test support: embedded fixtures, a seeded random policy generator and a
//! brute-force reference reasoner to compare the engine against.

pub mod fixtures;
pub mod oracle;
pub mod random;
pub mod summary;

pub use oracle::Oracle;
pub use random::{random_kb, random_kb_with, Limits, RandomKb};
