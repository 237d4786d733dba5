use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input data (potentials, grids, tables).
    #[error("input error: {0}")]
    Input(String),

    /// A parameter combination violates the hypotheses of the bound being applied.
    #[error("parameter rejected: {condition}")]
    Hypothesis { condition: String },

    /// An iterative procedure failed to settle. `dump` carries diagnostic samples.
    #[error("no convergence: {message}")]
    Convergence {
        message: String,
        dump: Vec<(f64, f64, f64)>,
    },

    /// An internal identity that must hold did not (e.g. a Wronskian sign).
    #[error("internal consistency violated: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
