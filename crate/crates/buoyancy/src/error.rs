use std::path::PathBuf;

use buoyancy_core::{EngineError, ThingId, Violation};
use thiserror::Error;

/// Why a scenario document was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("event {index} references unknown thing `{id}`")]
    UnknownReference { index: usize, id: ThingId },
    #[error("event {index} is earlier than the event before it")]
    UnsortedEvents { index: usize },
    #[error("invalid scenario: {}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Scenario {
        path: PathBuf,
        #[source]
        source: ScenarioError,
    },
    #[error("{0}")]
    Params(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("corrupt snapshot: {0}")]
    Snapshot(String),
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("bad template parameter: {0}")]
    BadParam(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error; documented in `mb --help`.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Io { .. } => 3,
            Error::Scenario {
                source: ScenarioError::MalformedDocument(_),
                ..
            }
            | Error::Params(_) => 4,
            Error::Scenario { .. } => 5,
            Error::Engine(_) => 6,
            Error::Snapshot(_) => 7,
            Error::UnknownTemplate(_) | Error::BadParam(_) => 8,
        }
    }
}
