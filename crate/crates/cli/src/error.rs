use geoloop::{DomainError, FlowError};

/// Failures of a CLI run. Each carries the operation that failed.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{op}: {msg}")]
    Config { op: &'static str, msg: String },
    #[error("{op}: {msg}")]
    Numerical { op: &'static str, msg: String },
}

impl CliError {
    pub fn config(op: &'static str, msg: impl Into<String>) -> Self {
        CliError::Config { op, msg: msg.into() }
    }

    pub fn numerical(op: &'static str, msg: impl Into<String>) -> Self {
        CliError::Numerical { op, msg: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    pub fn from_flow(op: &'static str, e: FlowError) -> Self {
        match e {
            FlowError::InvalidParams(_) => Self::config(op, e.to_string()),
            e => Self::numerical(op, e.to_string()),
        }
    }

    pub fn from_domain(op: &'static str, e: DomainError) -> Self {
        match e {
            DomainError::Flow(f) => Self::from_flow(op, f),
            DomainError::Configuration(_) | DomainError::ContractionRefused { .. } | DomainError::Escape { .. } => {
                Self::config(op, e.to_string())
            }
            e => Self::numerical(op, e.to_string()),
        }
    }
}
