use fbtransducer::ModelError;
use fbtransducer_oracle::OracleError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Oracle(#[from] OracleError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON output failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse failed: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Stable identifier for the error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Model(e) => match e {
                ModelError::CriticalCoupling { .. } => "critical_coupling",
                ModelError::UnknownPreset(_) => "unknown_preset",
                ModelError::InvalidParameter { .. } => "invalid_parameter",
                ModelError::GridTooCoarse(_) => "grid_too_coarse",
                ModelError::GridMismatch => "grid_mismatch",
                ModelError::NumericalBranch(_) => "numerical_branch",
                ModelError::OutOfScope(_) => "out_of_scope",
            },
            CliError::Oracle(e) => match e {
                OracleError::Model(_) => "model",
                OracleError::UnstableStep { .. } => "unstable_step",
                OracleError::Diverged { .. } => "diverged",
                OracleError::TooFewSegments { .. } => "too_few_segments",
                OracleError::InvalidConfig(_) => "invalid_config",
                OracleError::OutsideGrid(_) => "outside_grid",
            },
            CliError::Io { .. } => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
            CliError::Toml(_) => "config_parse",
            CliError::Config(_) => "config",
            CliError::Usage(_) => "usage",
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
