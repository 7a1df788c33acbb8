use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A computation could not be completed (degenerate data, singular system, ...).
    #[error("computation failed: {0}")]
    Computation(String),
    /// All components of a polynomial map vanish at the point.
    #[error("indeterminate image at point {point:?}")]
    Indeterminate { point: Vec<String> },
    /// A configured resource or search cap was reached.
    #[error("resource cap reached: {0}")]
    ResourceCap(String),
    /// Computed values disagree with embedded reference values.
    #[error("golden mismatch: {0}")]
    GoldenMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Precondition(_) => "precondition",
            Error::Computation(_) => "computation",
            Error::Indeterminate { .. } => "indeterminate",
            Error::ResourceCap(_) => "resource_cap",
            Error::GoldenMismatch(_) => "golden_mismatch",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GoldenMismatch(_) => 3,
            Error::ResourceCap(_) => 4,
            Error::Computation(_) | Error::Indeterminate { .. } => 1,
            Error::Precondition(_) | Error::Io(_) | Error::Json(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
