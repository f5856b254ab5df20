use thiserror::Error;

/// Errors raised by geometry routines.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerically degenerate hull: {0}")]
    DegenerateHull(String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error("ill-conditioned polynomial fit (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("quadrature did not converge: estimated relative error {0:.3e}")]
    NoConvergence(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl GeomError {
    /// Stable machine-readable tag, used by the CLI and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            GeomError::DimensionMismatch { .. } => "dimension_mismatch",
            GeomError::InvalidParameter(_) => "invalid_parameter",
            GeomError::DegenerateHull(_) => "degenerate_hull",
            GeomError::Lp(_) => "lp_failure",
            GeomError::IllConditioned(_) => "ill_conditioned",
            GeomError::NoConvergence(_) => "no_convergence",
            GeomError::Precondition(_) => "precondition",
            GeomError::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(GeomError::DimensionMismatch { expected, got });
    }
    Ok(())
}
