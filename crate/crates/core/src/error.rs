use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by model validation, integrators and parameter-space searches.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParams { field: &'static str, message: String },

    #[error("time {t} outside schedule domain [0, {tau}]")]
    ScheduleDomain { t: f64, tau: f64 },

    #[error(
        "amplitude integrator stalled at t = {t_reached:.6e} of {tau:.6e} \
         after {steps} steps (rtol {rtol:.1e}, atol {atol:.1e})"
    )]
    IntegratorStalled {
        t_reached: f64,
        tau: f64,
        steps: usize,
        rtol: f64,
        atol: f64,
    },

    #[error("propagator step budget exceeded: {steps} steps taken, limit {max_steps}")]
    PropagatorStepLimit { steps: usize, max_steps: usize },

    #[error("unitarity defect {defect:.3e} exceeds tolerance {tol:.3e} after {steps} steps")]
    UnitarityDefect { defect: f64, tol: f64, steps: usize },

    #[error(
        "closed-form energetics deviate from the density-matrix propagation by \
         {deviation:.3e} (tolerance {tol:.3e})"
    )]
    EnergeticsMismatch { deviation: f64, tol: f64 },

    #[error("bracket expansion failed: {0}")]
    BracketFailed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("temperature gap not found: {0}")]
    GapNotFound(String),
}
