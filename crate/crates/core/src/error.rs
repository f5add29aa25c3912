use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated (shape, symmetry, range).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Evaluation hit (or got too close to) a pole / blow-up.
    #[error("pole{}: {detail}", at.map(|u| format!(" at u = {u}")).unwrap_or_default())]
    Pole {
        /// Location of the pole along the evaluation parameter, when known.
        at: Option<f64>,
        detail: String,
    },

    /// A numerical procedure failed to reach its accuracy contract.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A configuration the algorithms cannot handle (treated as a bug signal
    /// where the theory guarantees it cannot occur).
    #[error("degenerate configuration: {0}")]
    Degeneracy(String),

    /// A cross-check that must succeed by theory did not.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn pole(at: Option<f64>, detail: impl Into<String>) -> Self {
        Error::Pole {
            at,
            detail: detail.into(),
        }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
