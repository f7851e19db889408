use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("placement error: {0}")]
    Placement(String),
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("mode error: {0}")]
    Mode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
