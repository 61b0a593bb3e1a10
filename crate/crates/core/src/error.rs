use std::path::PathBuf;

use crate::schedule::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty instance: no grid site was occupied")]
    EmptyInstance,
    #[error("oracle cap exceeded: {n_qubits} qubits > cap {cap}")]
    OracleCapExceeded { n_qubits: usize, cap: usize },
    #[error("simulator cap exceeded: {n_qubits} qubits > cap {cap}")]
    SimulatorCapExceeded { n_qubits: usize, cap: usize },
    #[error("duplicate positions at indices {0} and {1}")]
    DuplicatePosition(usize, usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("device constraint violation: {0}")]
    DeviceConstraint(String),
    #[error("schedule violates device limits: {}", format_violations(.0))]
    ScheduleViolations(Vec<Violation>),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("objective returned a non-finite value {value} at {point:?}")]
    NonFiniteObjective { value: f64, point: Vec<f64> },
    #[error("sample set is empty")]
    EmptySamples,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown unit tag `{0}`")]
    UnknownUnit(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
