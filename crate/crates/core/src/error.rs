//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad arguments or configuration.
    Usage,
    /// Missing, malformed, or insufficient input data.
    Data,
    /// A numerical procedure failed (no overlap, singular system, ...).
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("timestamps not strictly increasing: {0}")]
    UnorderedTimestamps(String),

    #[error("missing input: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("no overlap between source and target within the correspondence distance")]
    NoOverlap,

    #[error("normal system is rank-deficient; geometry does not constrain all six degrees of freedom")]
    SingularSystem,

    #[error("degenerate alignment: {0}")]
    DegenerateAlignment(String),

    #[error("no timestamp associations within the tolerance window")]
    NoAssociation,

    #[error("no stationary segments detected")]
    NoStationarySegments,

    #[error("localization lost: {0}")]
    LocalizationLost(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("process spawn failed for {command}: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable identifier, one per variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::EmptyInput(_) => "empty_input",
            Error::InsufficientData(_) => "insufficient_data",
            Error::UnorderedTimestamps(_) => "unordered_timestamps",
            Error::MissingInput(_) => "missing_input",
            Error::Parse { .. } => "parse_error",
            Error::NoOverlap => "no_overlap",
            Error::SingularSystem => "singular_system",
            Error::DegenerateAlignment(_) => "degenerate_alignment",
            Error::NoAssociation => "no_association",
            Error::NoStationarySegments => "no_stationary_segments",
            Error::LocalizationLost(_) => "localization_lost",
            Error::Unsupported(_) => "unsupported",
            Error::Spawn { .. } => "spawn_failed",
            Error::Io(_) => "io_error",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidArgument(_) | Error::Unsupported(_) => ErrorClass::Usage,
            Error::EmptyInput(_)
            | Error::InsufficientData(_)
            | Error::UnorderedTimestamps(_)
            | Error::MissingInput(_)
            | Error::Parse { .. }
            | Error::NoAssociation
            | Error::NoStationarySegments
            | Error::Spawn { .. }
            | Error::Io(_) => ErrorClass::Data,
            Error::NoOverlap
            | Error::SingularSystem
            | Error::DegenerateAlignment(_)
            | Error::LocalizationLost(_) => ErrorClass::Numerical,
        }
    }
}
