use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation point has zero coordinate z_{}", var + 1)]
    ZeroEvaluationPoint { var: usize },

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("exact GCD unavailable: {nvars} variables (supported for d <= 2)")]
    GcdUnsupported { nvars: usize },

    #[error("resultant requires exactly 2 variables, got {nvars}")]
    ResultantDimension { nvars: usize },

    #[error("degree 0 in variable z_{}", var + 1)]
    DegreeZero { var: usize },

    #[error("minor size {size} out of range for {rows}x{cols} matrix")]
    MinorSize { size: usize, rows: usize, cols: usize },

    #[error("unknown joint label {0:?}")]
    UnknownJoint(String),

    #[error("unknown gallery name {0:?}")]
    UnknownGallery(String),

    #[error("invalid framework: {}", violations.join("; "))]
    InvalidFramework { violations: Vec<String> },

    #[error("supercell repetition counts must be >= 1, got {0:?}")]
    BadRepetitions(Vec<i64>),

    #[error("{0}")]
    InvalidArgument(String),
}
