use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the model, spectral and metric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Characteristic polynomial carries imaginary coefficients above tolerance,
    /// i.e. the assembled matrix is not PT-symmetric.
    #[error("PT-symmetry broken at matrix level: imaginary coefficient defect {defect:e} exceeds {allowed:e}")]
    PtBroken { defect: f64, allowed: f64 },

    #[error("root finder did not converge after {iterations} iterations (max step {max_step:e})")]
    NumericFailure { iterations: usize, max_step: f64, best: Vec<Complex64> },

    #[error("near-degenerate eigenvalues {first} and {second} (gap {gap:e})")]
    Degenerate { first: Complex64, second: Complex64, gap: f64 },

    #[error("singular point: {0}")]
    Singular(String),

    #[error("inconsistent eigenpoint: {0}")]
    Inconsistent(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("no transition found on [{lo}, {hi}]")]
    NoTransition { lo: f64, hi: f64 },

    /// The request needs an unbroken spectrum but complex eigenvalues are present.
    #[error("metric not constructible: {0}")]
    NonConstructible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite {what}")))
    }
}
