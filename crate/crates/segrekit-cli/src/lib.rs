//! Command-line front end: a small declaration DSL for models, maps, and
//! jets, a built-in example registry, and deterministic JSON reports.
//!
//! Invariants:
//! - Parsing and serialization round-trip: `parse(serialize(doc)) == doc`.
//! - Reports are byte-identical across runs with the same degree and seed.
//! - Every failure record carries the lowest offending monomial or the
//!   failing precondition text; preconditions are reported, not thrown.

pub mod corpus;
pub mod dsl;
pub mod report;
pub mod runner;
