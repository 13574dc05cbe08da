use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite entry at [{row}][{col}]")]
    NonFinite { row: usize, col: usize },

    #[error("matrix not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {deviation:.3e} exceeds {tol:.3e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        deviation: f64,
        tol: f64,
    },

    #[error("matrix not Hermitian: worst deviation {deviation:.3e} exceeds {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error(
        "Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal norm {off:.3e})"
    )]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("spectral reconstruction residual {residual:.3e} exceeds contract {bound:.3e}")]
    BadResidual { residual: f64, bound: f64 },

    #[error("matrix numerically singular: |det| = {det:.3e} at or below threshold {tol:.3e}")]
    Singular { det: f64, tol: f64 },

    #[error("{context}: {details}")]
    Domain {
        context: &'static str,
        details: String,
    },

    #[error("covariance matrix is unphysical: uncertainty margin {min_eigenvalue:.3e}")]
    Unphysical { min_eigenvalue: f64 },

    #[error("state is not strictly P-representable: margin {min_eigenvalue:.3e} below required {required:.3e}")]
    NotPRepresentable { min_eigenvalue: f64, required: f64 },

    #[error("local symplectic blocks must have unit determinant: got {det1:.12}, {det2:.12}")]
    NotSymplectic { det1: f64, det2: f64 },

    #[error("standard-form reduction left off-pattern entries (worst {deviation:.3e})")]
    ReductionFailed { deviation: f64 },

    #[error("search exhausted without a certified result: {0}")]
    SearchFailed(String),
}

impl Error {
    /// Shorthand for domain violations on scalar arguments.
    pub(crate) fn domain(context: &'static str, details: impl Into<String>) -> Self {
        Error::Domain {
            context,
            details: details.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
