use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("invalid POVM: {0}")]
    Povm(String),
    #[error("invalid network spec: {0}")]
    Network(String),
    #[error("invalid hidden-variable model: {0}")]
    Model(String),
    #[error("no sign change on bracket [{0}, {1}]")]
    NoBracket(f64, f64),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
