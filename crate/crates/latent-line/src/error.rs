use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument was outside the domain of a math kernel.
    #[error("domain error in {func}: argument {value} is out of range")]
    Domain { func: &'static str, value: f64 },

    /// A parameter or configuration value violated an invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A vertex index was out of bounds or otherwise unusable.
    #[error("bad vertex index: {0}")]
    BadVertex(String),

    /// Two inputs that must describe the same vertex set disagree.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// Order recovery could not find any candidate anchor vertex.
    ///
    /// Raised when no vertex avoids the middle position in every admissible
    /// triple (or when the anchor's far set is empty). This signals that the
    /// distance estimate is too noisy, or the window too tight, for the
    /// configured scale; it is surfaced rather than silently worked around.
    #[error("empty anchor set: no endpoint-zone vertex could be identified")]
    EmptyAnchorSet,

    /// A text file did not match the expected format.
    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 config, 3 algorithmic, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. }
            | Error::InvalidParameter(_)
            | Error::BadVertex(_)
            | Error::SizeMismatch(_) => 2,
            Error::EmptyAnchorSet => 3,
            Error::Format { .. } | Error::Io { .. } => 4,
        }
    }
}
