use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("uniform draw {u} outside [0, {total})")]
    DrawOutOfRange { u: f64, total: f64 },
    #[error("word {0:?} never occurs in the corpus")]
    ZeroFrequency(String),
    #[error("coherence needs at least 2 top words, got {0}")]
    TooFewTopWords(usize),
    #[error("{0} is empty")]
    EmptyInput(&'static str),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
