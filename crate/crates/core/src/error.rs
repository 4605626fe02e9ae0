use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("time constant must be positive, got {0}")]
    NonPositiveTau(f64),
    #[error("gain must be non-negative, got {0}")]
    NegativeGain(f64),
    #[error("refractory period must be non-negative, got {0}")]
    NegativeRefractory(f64),
    #[error("threshold {threshold} must exceed reset {reset}")]
    EmptyMembraneRange { reset: f64, threshold: f64 },
}

/// A single violated parameter invariant, tied to the config key it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl Violation {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown parameter `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid parameters: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl ConfigError {
    /// Keys named by this error, for callers that want to point at offending
    /// config entries.
    pub fn keys(&self) -> Vec<&str> {
        match self {
            ConfigError::UnknownKey(k) => vec![k.as_str()],
            ConfigError::BadValue { key, .. } => vec![key.as_str()],
            ConfigError::Invalid(v) => v.iter().map(|v| v.key.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed trace: {message}")]
    Trace { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Io { .. } | Error::Trace { .. } => 2,
        }
    }
}

impl From<DynamicsError> for Error {
    fn from(e: DynamicsError) -> Self {
        Error::Config(e.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
