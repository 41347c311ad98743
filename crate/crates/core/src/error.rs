use num_complex::Complex64;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singular(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(
        "quadrature on [{a}, {b}] exhausted {subdivisions} subdivisions \
         (partial estimate {estimate}, error estimate {error:e})"
    )]
    Quadrature {
        a: f64,
        b: f64,
        estimate: Complex64,
        error: f64,
        subdivisions: usize,
    },
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// True for errors produced by the numerics rather than by invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Quadrature { .. } | Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
