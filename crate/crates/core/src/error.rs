use thiserror::Error;

/// Errors raised by the lattice, reduction, enumeration and precoder routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimError { expected: usize, got: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,

    #[error("degenerate basis: |det| = {0:e}")]
    DegenerateBasis(f64),

    #[error("form is too badly conditioned for exhaustive enumeration (ratio {0:e})")]
    ConditioningError(f64),

    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(i128),

    #[error("cone is not pointed")]
    ConeNotPointed,

    #[error("ray is unbounded: the form stays in the Ryshkov polyhedron along it")]
    RayUnbounded,

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("orthogonality check failed (residual {0:e})")]
    OrthogonalityCheckFailed(f64),

    #[error("channel is singular (smallest/largest singular value = {0:e})")]
    SingularChannel(f64),

    #[error("invalid channel spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("numerical error: {0}")]
    NumericalError(String),

    #[error("trace budget {cap} is below the minimum {min}")]
    EmptyBudget { cap: f64, min: f64 },

    #[error("reproduction check failed: {0}")]
    ReproFailure(String),

    #[error("malformed input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad user input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimError { .. }
                | Error::InvalidDimension(_)
                | Error::NotPositiveDefinite
                | Error::DegenerateBasis(_)
                | Error::SingularChannel(_)
                | Error::InvalidSpectrum(_)
                | Error::EmptyBudget { .. }
                | Error::Input(_)
        )
    }
}
