//! Time-dependent evolution of the unitary strokes: field schedules, the
//! coupled amplitude equations of the working pair, and a brute-force
//! product-basis propagator that serves as an independent oracle.

mod ode;
mod oracle;

pub use ode::{integrate_amplitudes, AmplitudeState, Dopri5Options, WorkingLevel};
pub use oracle::{
    density_matrix_cycle, schrodinger_oracle, schrodinger_oracle_with_tol,
    transition_probabilities, CycleEnergiesOracle, Direction, PropagatorResult, ORACLE_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ModelParams};

/// Stroke durations below this are treated as quenches: the closed-form
/// overlap replaces a stiff zero-length integration.
pub const QUENCH_TAU_THRESHOLD: f64 = 1e-6;

/// Functional form of the drive between the field endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// Field squared interpolates linearly in time (the default drive).
    SqrtLinear,
    /// Field interpolates linearly in time.
    LinearH,
    /// Field interpolates linearly in the squared time fraction.
    LinearH2,
}

impl ScheduleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleKind::SqrtLinear => "sqrt-linear",
            ScheduleKind::LinearH => "linear-h",
            ScheduleKind::LinearH2 => "linear-h2",
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sqrt-linear" => Ok(ScheduleKind::SqrtLinear),
            "linear-h" => Ok(ScheduleKind::LinearH),
            "linear-h2" => Ok(ScheduleKind::LinearH2),
            other => Err(format!(
                "unknown schedule `{other}` (expected sqrt-linear, linear-h or linear-h2)"
            )),
        }
    }
}

/// Forward drive `h(t)` on `[0, tau]` with `h(0) = h1` and `h(tau) = h2`.
/// The reversed stroke is obtained by evaluating at `tau - t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSchedule {
    pub kind: ScheduleKind,
    pub h1: f64,
    pub h2: f64,
    pub tau: f64,
}

impl FieldSchedule {
    pub fn new(kind: ScheduleKind, h1: f64, h2: f64, tau: f64) -> Self {
        Self { kind, h1, h2, tau }
    }

    pub fn from_params(params: &ModelParams, kind: ScheduleKind) -> Self {
        Self::new(kind, params.h1, params.h2, params.tau)
    }

    /// Field and its time derivative at `t`, rejecting out-of-range times.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.tau).contains(&t) {
            return Err(Error::ScheduleDomain { t, tau: self.tau });
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> (f64, f64) {
        let u = t / self.tau;
        match self.kind {
            ScheduleKind::SqrtLinear => {
                let h = (self.h2 * self.h2 * u + self.h1 * self.h1 * (1.0 - u)).sqrt();
                let dh = (self.h2 * self.h2 - self.h1 * self.h1) / (2.0 * self.tau * h);
                (h, dh)
            }
            ScheduleKind::LinearH => {
                let h = self.h1 + (self.h2 - self.h1) * u;
                (h, (self.h2 - self.h1) / self.tau)
            }
            ScheduleKind::LinearH2 => {
                let h = self.h1 + (self.h2 - self.h1) * u * u;
                (h, 2.0 * (self.h2 - self.h1) * u / self.tau)
            }
        }
    }

    /// Second time derivative of the field, used by the propagator's step
    /// controller.
    pub(crate) fn second_derivative(&self, t: f64) -> f64 {
        match self.kind {
            ScheduleKind::SqrtLinear => {
                let (h, _) = self.eval_unchecked(t);
                let k = (self.h2 * self.h2 - self.h1 * self.h1) / (2.0 * self.tau);
                -k * k / (h * h * h)
            }
            ScheduleKind::LinearH => 0.0,
            ScheduleKind::LinearH2 => 2.0 * (self.h2 - self.h1) / (self.tau * self.tau),
        }
    }
}

/// Adiabaticity parameter `P(tau)`: survival probability of the lower
/// working level across the forward stroke.
///
/// Equal couplings freeze the working pair, so `P = 1` without integration;
/// below [`QUENCH_TAU_THRESHOLD`] the closed-form quench overlap is returned.
pub fn adiabaticity(params: &ModelParams, schedule: &FieldSchedule) -> Result<f64> {
    if params.anisotropy() == 0.0 {
        return Ok(1.0);
    }
    if schedule.tau < QUENCH_TAU_THRESHOLD {
        return Ok(model::quench_adiabaticity(params));
    }
    let state = integrate_amplitudes(params, schedule, WorkingLevel::Lower)?;
    Ok(state.c1.norm_sqr())
}

/// Outcome of comparing the forward and reversed stroke propagators.
#[derive(Clone, Copy, Debug)]
pub struct MicroreversibilityReport {
    /// Max over level pairs (i, j) of the difference between forward and
    /// reversed transition probabilities.
    pub probability_deviation: f64,
    /// Frobenius distance between the reversed propagator and the
    /// conjugation image of the forward one.
    pub symmetry_defect: f64,
}

/// Builds both stroke propagators and measures how well the reversed one
/// mirrors the forward transition probabilities; also checks the antiunitary
/// relation between the two (the reversed propagator equals the entrywise
/// conjugate of the forward adjoint, i.e. its transpose).
pub fn microreversibility_check(
    params: &ModelParams,
    schedule: &FieldSchedule,
    tol: f64,
) -> Result<MicroreversibilityReport> {
    let forward = schrodinger_oracle_with_tol(params, schedule, Direction::Forward, tol)?;
    let reversed = schrodinger_oracle_with_tol(params, schedule, Direction::Reversed, tol)?;

    let probs_fwd = transition_probabilities(params, schedule, Direction::Forward, &forward.u);
    let probs_rev = transition_probabilities(params, schedule, Direction::Reversed, &reversed.u);

    let mut probability_deviation: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            // Forward takes level j at h1 to level i at h2; the reversed
            // stroke takes level i at h2 back to level j at h1.
            probability_deviation = probability_deviation.max((probs_fwd[(i, j)] - probs_rev[(j, i)]).abs());
        }
    }

    let symmetry_defect = (reversed.u - forward.u.transpose()).norm();

    Ok(MicroreversibilityReport {
        probability_deviation,
        symmetry_defect,
    })
}
