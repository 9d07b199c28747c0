use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GridError>;

#[derive(Debug, Error)]
pub enum GridError {
    /// A CSV row could not be read as `from,to,voltage_kv[,circuit_id]`.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input was well-formed but violates a precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// The metric has no meaning for this graph (too few nodes, no edges, ...).
    #[error("undefined metric {metric}: {reason}")]
    UndefinedMetric { metric: &'static str, reason: String },

    /// Voltage filtering removed every edge.
    #[error("variant {variant} has no edges")]
    EmptyVariant { variant: String },

    #[error("degree fit needs at least 3 occupied degrees, got {found}")]
    InsufficientSupport { found: usize },

    #[error("degree distribution does not decay (slope {slope})")]
    NonDecaying { slope: f64 },

    /// Error raised while processing one labeled item (variant, network, scenario).
    #[error("{label}: {source}")]
    Labeled {
        label: String,
        #[source]
        source: Box<GridError>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GridError {
    pub fn validation(msg: impl Into<String>) -> Self {
        GridError::Validation(msg.into())
    }

    pub fn undefined(metric: &'static str, reason: impl Into<String>) -> Self {
        GridError::UndefinedMetric {
            metric,
            reason: reason.into(),
        }
    }

    pub fn labeled(self, label: impl Into<String>) -> Self {
        GridError::Labeled {
            label: label.into(),
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GridError::Io {
            path: path.into(),
            source,
        }
    }

    /// The innermost error, with labels stripped.
    pub fn root(&self) -> &GridError {
        match self {
            GridError::Labeled { source, .. } => source.root(),
            other => other,
        }
    }
}
