use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("sampling exhausted: {0}")]
    SamplingExhausted(String),
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for argument errors, 3 for
    /// resource/sampling limits, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::CheckpointMismatch(_) => 2,
            Error::Resource(_) | Error::SamplingExhausted(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
