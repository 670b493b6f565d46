use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("non-finite sample: {0}")]
    NonFinite(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("unsupported version: {0}")]
    UnsupportedVersion(String),
    #[error("checksum mismatch: expected {expected}, found {found}")]
    Checksum { expected: String, found: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable lowercase name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Range(_) => "range",
            Error::Singularity(_) => "singularity",
            Error::Quadrature(_) => "quadrature",
            Error::NonFinite(_) => "non_finite",
            Error::Geometry(_) => "geometry",
            Error::Accuracy(_) => "accuracy",
            Error::Resolution(_) => "resolution",
            Error::Precondition(_) => "precondition",
            Error::Consistency(_) => "consistency",
            Error::Format(_) => "format",
            Error::UnsupportedVersion(_) => "unsupported_version",
            Error::Checksum { .. } => "checksum",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
