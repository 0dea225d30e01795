//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SegreError {
    /// An input violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The requested computation is not well posed for these inputs
    /// (rank-deficient data, degenerate model, missing witness).
    #[error("not well posed: {0}")]
    NotWellPosed(String),

    /// The truncation cap is too small for the requested operation.
    #[error("insufficient degree cap: have {have}, need at least {need} ({context})")]
    InsufficientCap { have: u32, need: u32, context: String },

    /// The supplied jet order is too small for the requested reconstruction.
    #[error("insufficient jet order: have {have}, need at least {need} ({context})")]
    InsufficientJetOrder { have: u32, need: u32, context: String },

    /// A sampled point was degenerate (e.g. a denominator vanished); the
    /// caller may resample.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Deterministic resampling gave up.
    #[error("sampling exhausted after {attempts} attempts: {context}")]
    SamplingExhausted { attempts: u32, context: String },

    /// Partial data (a jet or one side of a pair) admits no extension to a
    /// model-preserving map within the working cap.
    #[error("does not extend: {0}")]
    DoesNotExtend(String),

    /// DSL parse or elaboration failure.
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, SegreError>;
