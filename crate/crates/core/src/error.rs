use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad weights, mismatched alphabets, out-of-range parameters.
    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    /// A dense enumeration or subset budget would be exceeded.
    #[error("compute cap exceeded: {what} needs {needed} entries, cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },

    /// An iterative routine stopped before reaching its tolerance.
    #[error("{routine} did not converge after {iterations} iterations (bracket width {bracket_width:e})")]
    NonConvergence {
        routine: String,
        iterations: usize,
        bracket_width: f64,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("could not parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn cap(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed,
            cap,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } | Error::Io { .. } | Error::Parse { .. } => 2,
            Error::CapExceeded { .. } => 3,
            Error::NonConvergence { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
