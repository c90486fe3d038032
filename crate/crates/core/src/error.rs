use thiserror::Error;

/// Errors raised by the model and its I/O surfaces.
///
/// Variants split into two families: malformed input (bad CSV, I/O
/// failures) and domain violations (parameters outside the region where
/// a formula is defined). The CLI maps them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("need at least 2 distinct timestamps, got {0}")]
    TooFewPoints(usize),

    #[error("line {line}: price must be positive, got {price}")]
    NonPositivePrice { line: usize, price: f64 },

    #[error("io: {0}")]
    Io(String),

    #[error("segment {segment} of {segments} contains no ticks; data too sparse for this transition count")]
    EmptySegment { segment: usize, segments: usize },

    #[error("all segment oscillations are zero; oscillation bound is undefined")]
    ZeroOscillation,

    #[error("invalid parameter {name}: {reason}")]
    Domain { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed input rather than parameter domains.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedRow { .. }
                | Error::TooFewPoints(_)
                | Error::NonPositivePrice { .. }
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
