//! Failure classes with stable process exit codes.
//!
//! Usage errors exit with 2 (same code clap uses for argument errors),
//! configuration problems with 3, filesystem and git trouble with 4, and
//! malformed or inconsistent data with 5. Anything else is a bug and is
//! allowed to panic.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Usage,
    Config,
    Io,
    Data,
}

impl FailureKind {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureKind::Usage => 2,
            FailureKind::Config => 3,
            FailureKind::Io => 4,
            FailureKind::Data => 5,
        }
    }

    fn label(self) -> &'static str {
        match self {
            FailureKind::Usage => "usage",
            FailureKind::Config => "config",
            FailureKind::Io => "io",
            FailureKind::Data => "data",
        }
    }
}

/// A classified, user-facing error. The message is already fully rendered;
/// callers attach context at construction time.
#[derive(Debug)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Usage, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Config, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Io, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Data, message: message.into() }
    }

    /// Wraps a raw I/O error with the path or action that triggered it.
    pub fn io_ctx(what: impl fmt::Display, err: impl fmt::Display) -> Self {
        Failure::io(format!("{what}: {err}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind.label(), self.message)
    }
}

impl std::error::Error for Failure {}

pub type Result<T> = std::result::Result<T, Failure>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_exit_codes_are_distinct() {
        let codes = [
            FailureKind::Usage.exit_code(),
            FailureKind::Config.exit_code(),
            FailureKind::Io.exit_code(),
            FailureKind::Data.exit_code(),
        ];
        for (i, a) in codes.iter().enumerate() {
            for b in &codes[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!(codes.iter().all(|c| *c != 0 && *c != 1));
    }

    #[test]
    fn test_display_carries_class_and_message() {
        let f = Failure::io_ctx("reading x.csv", "permission denied");
        assert_eq!(f.to_string(), "io error: reading x.csv: permission denied");
    }
}
