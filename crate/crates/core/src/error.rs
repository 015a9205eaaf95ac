use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("trace error: {0}")]
    Trace(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("comparison error: {0}")]
    Comparison(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
