use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Variants map onto process exit codes (see [`Error::exit_code`]) so the
/// command-line front end can distinguish "you called it wrong" from "the
/// inputs were outside the mathematical domain" from "a numeric budget or
/// conditioning limit was hit".
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation
    /// (e.g. q outside (0,1) where a geometric law is required).
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is defined but numerically untrustworthy for these
    /// inputs (e.g. nearly coincident activities in a partial-fraction form).
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    /// An enumeration or iteration budget was exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A numeric failure that is not a domain error (overflow, failed
    /// convergence, impossible bracket).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Malformed text input (level files, CLI values parsed by hand).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Bad command-line usage not already caught by the argument parser.
    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI: 2 usage, 3 domain/validation, 4 numeric/budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Domain(_) | Error::Parse { .. } => 3,
            Error::IllConditioned(_) | Error::Budget(_) | Error::Numeric(_) | Error::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
