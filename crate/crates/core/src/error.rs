use thiserror::Error;

/// Errors raised by profile construction, root solves and the time stepper.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidInput(String),

    #[error("wave curves do not intersect admissibly: {0}")]
    NoIntersection(String),

    #[error("iteration failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("truncation half-width too small: |dTheta({xi})| = {slope:e} exceeds {limit:e}")]
    TruncationTooSmall { xi: f64, slope: f64, limit: f64 },

    #[error("zero-strength wave has no decay rate to fit")]
    DegenerateWave,

    #[error("positivity violated at node {node} (x = {x}): {field} = {value:e} at t = {t}")]
    PositivityViolation {
        node: usize,
        x: f64,
        t: f64,
        field: &'static str,
        value: f64,
    },

    #[error("non-finite value at node {node} after {steps} steps (t = {t}); try a smaller time step")]
    BlowUp { node: usize, steps: u64, t: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("need at least 10 samples spanning a decade in t, got {got}")]
    InsufficientSamples { got: usize },

    #[error("states are not on a common isentrope: |ds| = {mismatch:e}")]
    EntropyMismatch { mismatch: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
