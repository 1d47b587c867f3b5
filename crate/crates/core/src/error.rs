use thiserror::Error;

/// Errors raised by table lookups, series evaluation, quadrature and the
/// verification front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} exceeds the table limit {max}")]
    TableLimit { index: usize, max: usize },

    #[error("{what}: tolerance not reached after {terms} terms (bound {bound:e})")]
    Convergence {
        what: &'static str,
        terms: usize,
        bound: f64,
    },

    #[error("{0}")]
    Domain(String),

    #[error("accuracy target missed: best value {value:e} with error bound {error_bound:e}")]
    Accuracy { value: f64, error_bound: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
