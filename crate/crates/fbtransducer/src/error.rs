use thiserror::Error;

/// Errors raised by the transducer model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// The optical cavity sits at critical coupling, where the symmetrizing
    /// feedback gain diverges.
    #[error("optical coupling efficiency {eta_l} is within {tol:e} of critical coupling 1/2")]
    CriticalCoupling { eta_l: f64, tol: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The phase-space grid cannot hold the state to the required accuracy.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grids differ in shape or extent")]
    GridMismatch,

    /// The seralian discriminant went negative, so the covariance matrix is
    /// not a physical state.
    #[error("symplectic eigenvalue discriminant is negative ({0:e})")]
    NumericalBranch(f64),

    /// The operation is only defined for a restricted parameter regime.
    #[error("out of scope: {0}")]
    OutOfScope(&'static str),
}

pub type Result<T> = std::result::Result<T, ModelError>;
