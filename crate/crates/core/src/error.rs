use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {requested} outside supported range {min}..={max}")]
    QubitCount {
        requested: usize,
        min: usize,
        max: usize,
    },
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("circuit acts on {circuit} qubits but the state has {state}")]
    QubitMismatch { circuit: usize, state: usize },
    #[error("{role} value {value} out of range for n = {n} (must be <= {max})")]
    ValueOutOfRange {
        role: &'static str,
        value: u64,
        n: usize,
        max: u64,
    },
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("learning rate must be in (0, 1], got {0}")]
    InvalidLearningRate(f64),
    #[error("max epochs must be at least 1")]
    InvalidMaxEpochs,
    #[error("dataset has n = {dataset} but the configuration has n = {config}")]
    DatasetMismatch { dataset: usize, config: usize },
    #[error("{message}")]
    Unsupported { message: String },
    #[error("line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
    #[error("metadata {path}: {source}")]
    Metadata {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by caller input (bad arguments, malformed
    /// files) as opposed to environment failures.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }

    pub(crate) fn parse(line: usize, field: &str, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}
