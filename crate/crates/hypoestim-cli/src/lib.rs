//! Std-side companion to `hypoestim-core`: CSV formats, external-series
//! ingestion, and the repetition-averaged experiment drivers behind the
//! `hypoestim` binary.

use std::fmt;
use std::io;
use std::path::Path;

pub mod csv;
pub mod experiments;
pub mod ingest;

/// Failure categories, one per process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unusable invocation or config file (exit 2).
    Usage(String),
    /// Filesystem trouble (exit 3).
    Io(String),
    /// A file opened fine but its contents are not what we expect (exit 4).
    Format(String),
    /// Propagated numerical errors from the core crate (exit 5).
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Format(_) => 4,
            Failure::Numeric(_) => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Io(m) => write!(f, "io: {m}"),
            Failure::Format(m) => write!(f, "format: {m}"),
            Failure::Numeric(m) => write!(f, "numerical: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<hypoestim_core::Error> for Failure {
    fn from(e: hypoestim_core::Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<hypoestim_core::GibbsError> for Failure {
    fn from(e: hypoestim_core::GibbsError) -> Self {
        Failure::Numeric(e.to_string())
    }
}

/// Wraps an `io::Error` with the path and operation that hit it.
pub(crate) fn io_fail(path: &Path, op: &str, e: io::Error) -> Failure {
    Failure::Io(format!("{op} {}: {e}", path.display()))
}
