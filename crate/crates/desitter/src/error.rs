use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] desitter_core::Error),

    /// Rejected parameters; nothing was computed.
    #[error("invalid parameters: {0}")]
    Validation(String),

    /// Riesz potential requested for data whose mass makes it diverge.
    #[error("(-Δ)^-s with s = {s} is not defined in dimension {n} for data of nonzero mass {mass}")]
    IllPosed { s: f64, n: usize, mass: f64 },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status: 2 for rejected input, 3 for accuracy failures,
    /// 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        use desitter_core::Error as C;
        match self {
            Error::Validation(_) | Error::IllPosed { .. } | Error::Json(_) => 2,
            Error::Core(C::Accuracy { .. }) => 3,
            Error::Core(C::Domain { .. })
            | Error::Core(C::Setup(_))
            | Error::Core(C::Support)
            | Error::Core(C::Singularity { .. })
            | Error::Core(C::SingularLocus { .. })
            | Error::Core(C::UnsupportedDimension(_))
            | Error::Core(C::DomainTooSmall { .. })
            | Error::Core(C::Coverage { .. }) => 2,
            Error::Core(C::OutOfRegime(_)) => 3,
            Error::Io { .. } => 1,
        }
    }
}
