use thiserror::Error;

/// Errors produced by the library.
///
/// Mathematical non-existence (for instance a radial boundary-value problem
/// with no monotone solution) is *not* an error; see
/// [`crate::radial::BvpOutcome`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("trajectory left the metric's valid range at t = {t} (rho = {rho})")]
    RangeExit { t: f64, rho: f64 },

    #[error("step size underflow (modulus {modulus})")]
    StepUnderflow { modulus: f64 },

    #[error("bisection could not bracket rho2 = {target}: largest slope reaches {reached}")]
    NonBracketing { target: f64, reached: f64 },

    #[error("solver diverged: residual grew for {sweeps} consecutive sweeps (last {residual:e})")]
    Divergence { sweeps: usize, residual: f64 },

    #[error("linear solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    LinearSolve { iterations: usize, residual: f64 },

    #[error("winding number {winding} on circle {row}; expected 1")]
    Winding { row: usize, winding: f64 },

    #[error(
        "no monotone radial harmonic map exists (zero-slope trajectory reaches {critical_outer})"
    )]
    NoSolution { critical_outer: f64 },

    #[error("degenerate mask: {0}")]
    DegenerateMask(String),

    #[error("unsupported data: {0}")]
    Unsupported(String),

    #[error("geodesic left the unit disk at arc length {at}")]
    DiskExit { at: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the failure is numerical (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RangeExit { .. }
                | Error::StepUnderflow { .. }
                | Error::NonBracketing { .. }
                | Error::Divergence { .. }
                | Error::LinearSolve { .. }
                | Error::Winding { .. }
                | Error::DiskExit { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
