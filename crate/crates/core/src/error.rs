use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid N-function parameters or an input outside an operation's domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An iterative method (bisection, quadrature doubling, tail bound) did not settle.
    #[error("convergence error in {context}: {detail}")]
    Convergence { context: &'static str, detail: String },

    /// No multiplicativity constant inside the admissible range works on the search grid.
    #[error("no multiplicativity certificate: {0}")]
    NoCertificate(String),

    /// Malformed serialized input (polynomial files and the like).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn convergence(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            context,
            detail: detail.into(),
        }
    }

    pub(crate) fn parameter(detail: impl Into<String>) -> Self {
        Error::Parameter(detail.into())
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
