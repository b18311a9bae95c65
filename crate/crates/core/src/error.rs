use thiserror::Error;

/// A configuration parameter outside its admissible range.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {name} = {value} {rule}")]
pub struct ConfigError {
    pub name: &'static str,
    pub value: f64,
    pub rule: &'static str,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),

    #[error("quadrature order must be at least 1")]
    ZeroOrder,

    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },

    #[error("adaptive integration did not reach tolerance {tol:e} within {budget} evaluations (estimate {estimate:e})")]
    NoConvergence {
        tol: f64,
        budget: usize,
        estimate: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
