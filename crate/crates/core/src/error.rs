use thiserror::Error;

use crate::newton::NewtonReport;

/// Errors produced by the integrator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown scheme `{name}`; available: {available}")]
    UnknownScheme { name: String, available: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("model `{model}` does not provide {capability}")]
    MissingCapability { model: String, capability: &'static str },

    #[error("{what} is implemented up to order {max}, requested {requested}")]
    UnsupportedOrder {
        what: &'static str,
        max: usize,
        requested: usize,
    },

    #[error("singular Jacobian at Newton iteration {iteration} (pivot {pivot:e})")]
    SingularJacobian { iteration: usize, pivot: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("tableau parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid method configuration: {0}")]
    InvalidMethod(String),

    /// Newton failed to converge (or diverged) for an implicit stage.
    /// `stage` is `None` when all implicit stages were solved as one coupled system.
    #[error("Newton did not converge at step {step}{}", stage_suffix(*.stage))]
    NotConverged {
        step: usize,
        stage: Option<usize>,
        report: Box<NewtonReport>,
    },
}

fn stage_suffix(stage: Option<usize>) -> String {
    match stage {
        Some(l) => format!(", stage {}", l + 1),
        None => ", coupled stages".to_string(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
