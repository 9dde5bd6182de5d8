use thiserror::Error;

/// Errors raised by the location-game routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),

    #[error("positions are not strictly ordered inside (0, L): {0:?}")]
    OrderViolation(Vec<f64>),

    #[error("negative discriminant {value} in best-response formula (epsilon too large relative to L?)")]
    NegativeDiscriminant { value: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("player index {index} out of range for {players} players")]
    PlayerIndex { index: usize, players: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
