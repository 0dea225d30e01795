//! Exact symbolic toolkit for real-analytic CR models in normal coordinates:
//! truncated power-series arithmetic over the Gaussian rationals, CR
//! invariants (finite type, finite nondegeneracy, Levi signature), iterated
//! Segre mappings, verification of Segre preserving holomorphic map pairs,
//! and reflection-based reconstruction of such maps from partial data.
//!
//! Everything is computed over exact rational arithmetic; no floating point
//! is used anywhere. Truncation caps are tracked pessimistically, so every
//! coefficient the library reports is exactly determined by the inputs.

pub mod error;
pub mod hspm;
pub mod multiindex;
pub mod rational;
pub mod sample;
pub mod series;

pub mod ift;
pub mod matrix;
pub mod model;
pub mod reflection;
pub mod segre;

#[cfg(test)]
pub mod testkit;

pub use error::{Result, SegreError};
pub use multiindex::MultiIndex;
pub use rational::GaussianRational;
pub use series::TruncatedSeries;
