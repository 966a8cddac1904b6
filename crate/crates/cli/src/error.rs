//! CLI-level errors mapped to process exit codes.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad input data, flags, or plan: exit 2.
    Validation(String),
    /// The optimizer failed or did not converge: exit 3.
    Convergence(String),
    /// Filesystem problems: exit 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Convergence(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<rankdisc::Error> for CliError {
    fn from(err: rankdisc::Error) -> Self {
        match err {
            rankdisc::Error::Convergence(msg) => CliError::Convergence(msg),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
