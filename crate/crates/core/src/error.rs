use thiserror::Error;

/// Errors produced by analysis, optimization, simulation, and configuration.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An optimization problem has an empty feasible set.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A structural or range problem in a parameter set.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Configuration file could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    /// Simulation setup problem (e.g. no slots left after warmup).
    #[error("simulation error: {0}")]
    Sim(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
