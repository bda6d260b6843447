use thiserror::Error;

/// Every failure mode of the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error(
        "series tail not converged at t = {t}: {modes} modes leave tail bound {bound:e} above tolerance {tol:e}"
    )]
    TailNotConverged {
        t: f64,
        modes: u64,
        bound: f64,
        tol: f64,
    },

    #[error("pole of the gamma = 1 family at xi = {xi} (r0 = {r0})")]
    PoleError { xi: f64, r0: f64 },

    #[error("reduction denominator vanishes at f = {f} (equilibrium of the traveling-wave ODE)")]
    DenominatorZero { f: f64 },

    #[error("solution diverged at x = {x}, t = {t} (value {value})")]
    DivergenceError { x: f64, t: f64, value: f64 },

    #[error("CFL violated: dt = {dt} > dx = {dx}")]
    CflViolation { dt: f64, dx: f64 },

    #[error("singular tridiagonal system at row {row}")]
    LinearSolveError { row: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("fixed-point iteration did not converge in {iterations} iterations (last difference {last_diff:e})")]
    NoConvergence { iterations: usize, last_diff: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("grid refinement did not stabilize sup S within 5% at eps = {eps} (last relative change {rel_change})")]
    GridNotConverged { eps: f64, rel_change: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that come from invalid inputs rather than from the
    /// numerics misbehaving.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::PreconditionViolation(_)
                | Error::CflViolation { .. }
                | Error::DomainError(_)
                | Error::GridMismatch(_)
        )
    }
}
