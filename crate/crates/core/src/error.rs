use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("not a probability vector: {0}")]
    InvalidSimplex(String),
    #[error("vector rank {rank} exceeds min(n, k) = {limit}")]
    RankTooLarge { rank: usize, limit: usize },
    #[error("not a valid state: {0}")]
    InvalidState(String),
    #[error("not a valid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("no catalog entry: {0}")]
    NotInCatalog(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotInCatalog(_) => 3,
            Error::ResourceLimit(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
