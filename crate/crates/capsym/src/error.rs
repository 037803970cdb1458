//! Error type shared by all modules.

use std::fmt;
use std::path::PathBuf;

/// Errors reported by the library.
///
/// The CLI maps `Input`, `Parse` and `Io` to exit code 2 and treats a
/// violated inequality (reported through the result types, not through
/// this enum) as exit code 1.
#[derive(Debug)]
pub enum Error {
    /// Malformed arguments: dimension mismatch, non-finite input,
    /// out-of-range parameter.
    Input(String),
    /// Mathematically undefined operation, e.g. a gauge gradient at the
    /// origin or a Sobolev exponent outside (1, n).
    Domain(String),
    /// A cone/dimension combination for which no method is implemented.
    Unsupported(String),
    /// A region or sublevel set touches the outer grid faces, so the
    /// computed measure would be truncated.
    Truncation(String),
    /// An iterative scheme failed to converge; carries diagnostics.
    Numeric(String),
    /// A field/region/problem file did not parse.
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    /// Underlying I/O failure.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "invalid input: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::Truncation(msg) => write!(f, "truncated region: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            Error::Parse { path, line, msg } => {
                write!(f, "parse error in {} at line {line}: {msg}", path.display())
            }
            Error::Io { path, source } => write!(f, "io error on {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
