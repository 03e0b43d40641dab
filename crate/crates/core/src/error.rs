use thiserror::Error;

/// Errors raised by constructors and checkers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space error: {0}")]
    Space(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("composition error: {0}")]
    Composition(String),
    #[error("structure error: {0}")]
    Structure(String),
    /// A construction refused to run because an input failed its checker.
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
