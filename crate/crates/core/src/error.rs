//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by scene loading, geometry construction, and the
/// optimization entry points. Messages name the offending room/object where
/// one exists so CLI users can locate the problem in their scene file.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("scene validation error: {0}")]
    Scene(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("evaluation budget exceeded: {0}")]
    Budget(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
