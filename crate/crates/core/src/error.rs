use thiserror::Error;

/// Errors raised by the operator-system calculus.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("matrix is not hermitian: ‖M − M*‖_F = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("element does not lie in the operator system `{0}`")]
    NotInSystem(String),

    #[error("incompatible systems: {0}")]
    IncompatibleSystems(String),

    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    #[error("map domain is not the full matrix algebra (dim {domain_dim}, need {full_dim})")]
    DomainNotFull { domain_dim: usize, full_dim: usize },

    #[error("missing diagonal representation: {0}")]
    MissingRepresentation(String),

    #[error("map is not {0}")]
    MapContract(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape(expected: impl Into<String>, got: impl Into<String>) -> Error {
    Error::ShapeMismatch {
        expected: expected.into(),
        got: got.into(),
    }
}
