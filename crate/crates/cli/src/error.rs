use std::fmt;

/// Exit status 1: a checker or a construction precondition failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit status 2: the input could not be read or resolved.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Malformed or unresolvable input; the message carries a locator.
    Input(String),
    /// A refused construction or pipeline gate.
    Refused(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    /// Library errors raised while resolving `at`. Refusals keep status 1.
    pub fn from_lib(at: &str, e: homalg::Error) -> Self {
        match e {
            homalg::Error::Precondition(m) => CliError::Refused(format!("{at}: {m}")),
            other => CliError::Input(format!("{at}: {other}")),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Refused(_) => EXIT_FAIL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Refused(m) => write!(f, "refused: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
