use std::fmt;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, configuration or unreadable paths (exit 1).
    Usage(String),
    /// The command finished but some inputs were skipped (exit 2).
    Partial(String),
    /// An input file is malformed or inconsistent (exit 3).
    Invalid(String),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Partial(_) => 2,
            Failure::Invalid(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Partial(m) | Failure::Invalid(m) => f.write_str(m),
        }
    }
}
