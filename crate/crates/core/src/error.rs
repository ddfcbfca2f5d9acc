use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain the operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request would exceed a configured size cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    /// The iterative eigensolver ran out of restarts; carries the best Ritz estimate.
    #[error(
        "eigensolver did not converge after {iterations} restarts \
         (best energy {best_energy}, residual {residual:e})"
    )]
    NotConverged {
        iterations: usize,
        best_energy: f64,
        residual: f64,
    },

    #[error(
        "quadrature did not converge after {panels} panels (last change {change:e}); \
         increase the node budget"
    )]
    Quadrature { panels: usize, change: f64 },

    #[error("correlations numerically zero")]
    NumericallyZero,

    #[error("insufficient data: need {needed} points above the noise floor, found {found}")]
    InsufficientData { needed: usize, found: usize },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn resource(msg: impl Into<String>) -> Error {
    Error::Resource(msg.into())
}
