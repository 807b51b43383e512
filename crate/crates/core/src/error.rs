use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown preset `{id}` (known: {known})")]
    UnknownPreset { id: String, known: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("configurations live on different mass grids")]
    GridMismatch,

    #[error("densities live on different intervals")]
    DomainMismatch,

    #[error("particle configuration is not strictly ordered inside the domain (first violation at index {index})")]
    NotOrdered { index: usize },

    #[error("mass cell {cell} has non-positive mass {mass:e}; the initial datum vanishes there (use a strictly positive approximation)")]
    VanishingCell { cell: usize, mass: f64 },

    #[error("Newton iteration did not converge within {iterations} iterations (residual l1 = {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("damping exceeded {dampings} halvings without reaching an admissible configuration")]
    DampingFailure { dampings: usize },

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("missing reference trajectory: {0}")]
    MissingReference(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the nonlinear solver, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NonConvergence { .. } | Error::DampingFailure { .. } => true,
            Error::StepFailed { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
