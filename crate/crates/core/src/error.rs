use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("degenerate column")]
    DegenerateColumn,

    #[error("out of partition range: {0}")]
    OutOfRange(f64),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("model returned non-finite value")]
    NonFinitePrediction,

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("model `{name}` expects {expected} parameters, got {got}")]
    ModelParameters {
        name: String,
        expected: String,
        got: usize,
    },

    #[error("failed to launch model process: {0}")]
    ProcessSpawn(#[source] std::io::Error),

    #[error("model process failed (exit {0})")]
    ProcessFailed(i32),

    #[error("model process terminated by signal")]
    ProcessKilled,

    #[error("prediction count mismatch: expected {expected}, got {got}")]
    PredictionCount { expected: usize, got: usize },

    #[error("unparsable prediction on line {line}: {text:?}")]
    PredictionParse { line: usize, text: String },

    #[error("permutation VIM requires a response column")]
    MissingResponse,

    #[error("constant model")]
    ConstantModel,

    #[error("missing second-order surface for pair ({0}, {1})")]
    MissingSurface(usize, usize),

    #[error("correlation matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("level with zero observations: {0}")]
    EmptyLevel(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the external model protocol (spawn, exit status,
    /// output shape or parse errors).
    pub fn is_model_protocol(&self) -> bool {
        matches!(
            self,
            Error::ProcessSpawn(_)
                | Error::ProcessFailed(_)
                | Error::ProcessKilled
                | Error::PredictionCount { .. }
                | Error::PredictionParse { .. }
                | Error::NonFinitePrediction
        )
    }
}
