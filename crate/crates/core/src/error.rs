use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("matrix is not an orthogonal projector (max deviation {0:e})")]
    NotProjector(f64),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("parameter {name} = {value} outside {domain}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("codewords are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("state is not in the codespace (residual {0:e})")]
    NotInCodespace(f64),

    #[error("unit-sphere constraint violated: |a|^2 + |b|^2 = {0}")]
    ConstraintViolation(f64),

    #[error("kernel completion reached rank {found} of {needed}")]
    DegenerateCompletion { found: usize, needed: usize },

    #[error("eigenvalue input mismatch: {0}")]
    EigenvalueMismatch(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),

    #[error("invalid serialized data: {0}")]
    InvalidData(String),

    #[error("eigen-solver did not converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
