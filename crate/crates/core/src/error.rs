use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("radial coordinate must be non-negative, got {0}")]
    NegativeRadius(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "quadrature did not converge after {evaluations} evaluations: \
         estimate {estimate:e}, error bound {error:e}"
    )]
    QuadratureDiverged {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("mode {0} lies outside the truncation window")]
    OutsideWindow(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(String),

    #[error("exact arithmetic unavailable: {0}")]
    ExactUnsupported(String),

    #[error("enumeration budget exceeded: {needed} compositions > budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
