use thiserror::Error;

use crate::placer::Placement;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong between reading inputs and emitting a program.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported gate `{0}` (decompose to cz and single-qubit gates first)")]
    UnsupportedGate(String),

    #[error("operand {operand} out of range for a {num_qubits}-qubit circuit")]
    OperandOutOfRange { operand: usize, num_qubits: usize },

    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("invalid trap address: {0}")]
    InvalidAddress(String),

    #[error("zone `{zone}` has no free capacity: {message}")]
    Capacity { zone: String, message: String },

    #[error("routing failed: {0}")]
    Routing(String),

    #[error("contract violation: {0}")]
    Contract(String),

    /// The search ran out of node expansions. `best` holds the cheapest complete
    /// placement known at that point, if any.
    #[error("search budget of {max_nodes} expansions exhausted")]
    SearchBudget {
        max_nodes: usize,
        best: Option<Box<Placement>>,
    },

    #[error("missing route for transition {0}")]
    Coverage(usize),

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
    /// Short machine-readable category, used in CLI error reports and FFI status codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::UnsupportedGate(_) => "unsupported_gate",
            Error::OperandOutOfRange { .. } => "operand_out_of_range",
            Error::Validation { .. } => "validation",
            Error::InvalidAddress(_) => "invalid_address",
            Error::Capacity { .. } => "capacity",
            Error::Routing(_) => "routing",
            Error::Contract(_) => "contract",
            Error::SearchBudget { .. } => "search_budget",
            Error::Coverage(_) => "coverage",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
