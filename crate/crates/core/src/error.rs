//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by sampling, fitting, and metric computations.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: evaluator expects {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty design: at least one sample is required")]
    EmptyDesign,

    #[error("equispaced grid requires a bounded marginal (feature {feature})")]
    UnsupportedScheme { feature: usize },

    #[error("degenerate grid: need at least {min} points, got {got}")]
    DegenerateGrid { min: usize, got: usize },

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("evaluator produced a non-finite output at instance {instance}, grid point {grid}")]
    EvaluatorFailure { instance: usize, grid: usize },

    #[error("fit failed: {summary}")]
    FitFailure {
        summary: String,
        /// Per-order diagnostics collected before giving up.
        per_order: Vec<(usize, String)>,
    },

    #[error("exact enumeration is limited to {limit} features, got {got}; sample permutations instead")]
    EnumerationBound { limit: usize, got: usize },

    #[error("matrix is not positive semidefinite (pivot {pivot:.3e} at index {index})")]
    NotPositiveSemidefinite { index: usize, pivot: f64 },

    #[error("model parse error at line {line}: {msg}")]
    ModelParse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
