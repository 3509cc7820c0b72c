use thiserror::Error;

/// Errors raised by the bound engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {0} outside the supported range 1..=8")]
    DimOutOfRange(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix not symmetric at ({row}, {col}): |difference| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("singular block (min eigenvalue {min_eig:e})")]
    SingularBlock { min_eig: f64 },

    #[error("Bloch vector norm {norm} reaches the pure-state boundary")]
    PureStateBoundary { norm: f64 },

    #[error("Bloch vector norm {norm} exceeds 1 (non-physical state)")]
    NonPhysical { norm: f64 },

    #[error("parameter {param} = {value} outside its domain {domain}")]
    DomainViolation {
        param: String,
        value: f64,
        domain: String,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid quadrature rule: {0}")]
    InvalidRule(String),

    #[error("quadrature did not converge (relative change {rel_change:e} on doubling)")]
    QuadratureDivergence { rel_change: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("outcome {outcome} has probability {prob:e} with nonvanishing derivative")]
    ZeroProbabilityOutcome { outcome: usize, prob: f64 },

    #[error("invalid weight matrix: {0}")]
    InvalidWeight(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
