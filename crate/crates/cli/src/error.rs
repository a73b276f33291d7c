use std::fmt;

/// Failure of a CLI run, split by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or configuration; exit code 1.
    Usage(String),
    /// The solver reported an error; exit code 2.
    Numerical(c3rotor::Error),
    /// Reading the config or writing output failed; exit code 2.
    Io(String, String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(..) => 2,
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{}", m.trim_end()),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(what, e) => write!(f, "{what}: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<c3rotor::Error> for CliError {
    fn from(e: c3rotor::Error) -> Self {
        CliError::Numerical(e)
    }
}
