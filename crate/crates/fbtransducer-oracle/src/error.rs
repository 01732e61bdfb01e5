use fbtransducer::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("time step {dt:e} too coarse: dt times the fastest rate is {product:.3}, limit 0.05")]
    UnstableStep { dt: f64, product: f64 },

    #[error("integration diverged at step {step} (|amplitude| = {magnitude:e})")]
    Diverged { step: usize, magnitude: f64 },

    #[error("Welch estimate needs at least {min} segments, got {got}")]
    TooFewSegments { got: usize, min: usize },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("analytic spectrum does not cover {0}")]
    OutsideGrid(f64),
}

pub type Result<T> = std::result::Result<T, OracleError>;
