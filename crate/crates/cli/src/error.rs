use std::fmt;

use sato_darboux::Error;

/// Failures mapped onto the documented exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files, unknown check names.
    Usage(String),
    /// Schema violation at a JSON pointer into the spec.
    Schema { pointer: String, message: String },
    /// An engine error; usage-like variants still exit with 2.
    Math(Error),
    /// Some verification failed; the reports were already written.
    Failed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed => 1,
            CliError::Usage(_) | CliError::Schema { .. } => 2,
            CliError::Math(e) => match e {
                Error::Invalid(_)
                | Error::UnknownCheck(_)
                | Error::FieldMismatch(..)
                | Error::RootOfUnity { .. }
                | Error::OrderMismatch(_) => 2,
                _ => 3,
            },
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Math(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Schema { pointer, message } => {
                let p = if pointer.is_empty() { "/" } else { pointer };
                write!(f, "schema error at {p}: {message}")
            }
            CliError::Math(e) => write!(f, "error: {e}"),
            CliError::Failed => write!(f, "verification failed"),
        }
    }
}
