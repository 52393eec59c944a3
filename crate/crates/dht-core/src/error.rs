//! Error type shared by the whole crate.

use std::fmt;

/// Crate-wide error enum.
///
/// The CLI maps these onto process exit codes, so the distinction between
/// variants is part of the public contract:
/// - `InvalidParameter`, `Resource`, `Numerical` are "the request was
///   well-formed but cannot be computed" (exit code 4),
/// - `Io` and `Format` are "reading or writing data failed" (exit code 3).
#[derive(Debug)]
pub enum Error {
    /// An argument is outside its documented domain (a pole, a bad range,
    /// an unsupported operator for the given entry point).
    InvalidParameter(String),
    /// The request is valid but would exceed a hard size cap (window width,
    /// FFT length, dense matrix dimension).
    Resource(String),
    /// An iterative scheme failed to reach its required residual.
    Numerical { message: String, residual: f64 },
    /// Underlying I/O failure.
    Io(std::io::Error),
    /// Structurally invalid data (CSV header, ordering, non-finite values).
    Format(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Resource(msg) => write!(f, "resource limit: {msg}"),
            Error::Numerical { message, residual } => {
                write!(f, "numerical failure: {message} (residual {residual:.3e})")
            }
            Error::Io(err) => write!(f, "i/o error: {err}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
