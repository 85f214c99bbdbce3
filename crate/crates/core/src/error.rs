use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("quadrature did not converge: achieved relative change {achieved:e} after {levels} refinements")]
    QuadratureNotConverged { achieved: f64, levels: usize },

    #[error("eigenvalue iteration did not converge: off-diagonal norm {off_norm:e} after {sweeps} sweeps")]
    EigenNotConverged { off_norm: f64, sweeps: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("entropy curve is missing n = {0}")]
    CurveGap(usize),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
