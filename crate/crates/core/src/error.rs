use thiserror::Error;

/// Errors raised across the simulation, solver and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Argument outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("regime classification is not supported for tabulated feedback")]
    UnsupportedClassification,

    #[error("feedback is not explosive (gamma = {gamma}); explosion time is infinite")]
    NonExplosive { gamma: f64 },

    /// The Severo recursion needs pairwise distinct feedback values.
    #[error("feedback values tie: f({lo}) = f({hi})")]
    TiedFeedback { lo: u64, hi: u64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("count overflow at agent {agent}")]
    Overflow { agent: usize },

    #[error("trajectory is still running")]
    StillRunning,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("integration error: {0}")]
    Integration(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
