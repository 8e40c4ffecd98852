use std::fmt::Display;
use std::io;

/// Usage errors exit with 2, domain errors with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// Downstream reader went away (e.g. `| head`); exit quietly.
    BrokenPipe,
    Domain { kind: &'static str, message: String },
}

impl Failure {
    pub fn domain(kind: &'static str, message: impl Display) -> Self {
        Failure::Domain {
            kind,
            message: message.to_string(),
        }
    }

    pub fn usage(message: impl Display) -> Self {
        Failure::Usage(message.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::BrokenPipe;
        }
        Failure::domain("io", e)
    }
}

pub type Outcome = Result<(), Failure>;

/// Attach a domain kind to any displayable error.
pub trait Tag<T> {
    fn tag(self, kind: &'static str) -> Result<T, Failure>;
    fn tag_with(self, kind: &'static str, context: impl Display) -> Result<T, Failure>;
}

impl<T, E: Display> Tag<T> for Result<T, E> {
    fn tag(self, kind: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure::domain(kind, e))
    }

    fn tag_with(self, kind: &'static str, context: impl Display) -> Result<T, Failure> {
        self.map_err(|e| Failure::domain(kind, format!("{context}: {e}")))
    }
}
