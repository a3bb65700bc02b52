use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] mdrk_core::Error),

    #[error("{0}")]
    Usage(String),

    #[error("problem `{0}` has no exact reference and the fine-grid fallback is disabled")]
    ReferenceUnavailable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Whether the failure stems from the invocation rather than from a computation.
    pub fn is_usage(&self) -> bool {
        use mdrk_core::Error as E;
        match self {
            LabError::Usage(_) | LabError::ReferenceUnavailable(_) => true,
            LabError::Core(e) => matches!(
                e,
                E::UnknownScheme { .. }
                    | E::InvalidParameters(_)
                    | E::InvalidMethod(_)
                    | E::MissingCapability { .. }
                    | E::UnsupportedOrder { .. }
                    | E::Parse { .. }
            ),
            _ => false,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
