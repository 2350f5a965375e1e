//! Assembly of the four-stroke cycle: mean energies at the cycle corners,
//! work and heat with their adiabatic/nonadiabatic splits, regime
//! classification and engine efficiency.
//!
//! Work along the unitary strokes is computed from the closed-form splits;
//! the heats come from corner-energy differences. The two routes are
//! algebraically equal, so their agreement (the first law) is a live check
//! on the implementation rather than an identity of the code.

use serde::{Deserialize, Serialize};

use crate::dynamics::{adiabaticity, density_matrix_cycle, FieldSchedule};
use crate::error::{Error, Result};
use crate::model::{self, ModelParams};

/// Mean internal energies at the four cycle corners plus the per-stroke
/// work/heat decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrokeEnergetics {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub w12_ad: f64,
    pub w12_na: f64,
    pub w21_ad: f64,
    pub w21_na: f64,
    pub w12: f64,
    pub w21: f64,
    pub q1_ad: f64,
    pub q1_na: f64,
    pub q2_ad: f64,
    pub q2_na: f64,
    pub q1: f64,
    pub q2: f64,
}

impl StrokeEnergetics {
    /// Net work injected over the cycle.
    pub fn w_cyc(&self) -> f64 {
        self.w12 + self.w21
    }

    /// Residual of `W_cyc + Q1 + Q2`, zero up to roundoff when the split
    /// formulas and the corner energies are consistent.
    pub fn first_law_residual(&self) -> f64 {
        self.w_cyc() + self.q1 + self.q2
    }
}

/// Thermodynamic operating regime of one cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Engine,
    Refrigerator,
    Accelerator,
    Heater,
    /// Sign pattern too close to a zone boundary to classify, or equal bath
    /// temperatures.
    Degenerate,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Engine => "engine",
            Regime::Refrigerator => "refrigerator",
            Regime::Accelerator => "accelerator",
            Regime::Heater => "heater",
            Regime::Degenerate => "degenerate",
        }
    }
}

/// Sense of the cycle on an entropy-field diagram, fixed by the bath
/// ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rotation {
    /// Bath 1 is hotter.
    Regular,
    /// Bath 2 is hotter.
    CounterRotating,
}

impl Rotation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rotation::Regular => "regular",
            Rotation::CounterRotating => "counter-rotating",
        }
    }
}

/// Complete outcome of one cycle evaluation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CycleOutcome {
    /// Adiabaticity parameter used for the unitary strokes.
    pub p: f64,
    pub energetics: StrokeEnergetics,
    pub w_cyc: f64,
    pub regime: Regime,
    pub rotation: Option<Rotation>,
    /// Present only when the regime is an engine.
    pub efficiency: Option<f64>,
    /// Deviation from the density-matrix propagation when a schedule drove
    /// the cycle; absent for explicit-P runs.
    pub oracle_deviation: Option<f64>,
}

impl CycleOutcome {
    /// Serialized regime label, with the rotation suffix for engines.
    pub fn regime_label(&self) -> String {
        regime_label(self.regime, self.rotation)
    }
}

pub fn regime_label(regime: Regime, rotation: Option<Rotation>) -> String {
    match (regime, rotation) {
        (Regime::Engine, Some(rot)) => format!("engine-{}", rot.as_str()),
        (r, _) => r.as_str().to_string(),
    }
}

/// How the unitary strokes are driven: either a concrete field schedule
/// (adiabaticity obtained by integration, energetics cross-checked against
/// the density-matrix propagation) or an explicit adiabaticity parameter.
#[derive(Clone, Copy, Debug)]
pub enum Drive {
    Schedule(FieldSchedule),
    Adiabaticity(f64),
}

/// Mean internal energies at the four cycle corners for a given
/// adiabaticity. Corners 1 and 3 are thermal and P-independent; corners 2
/// and 4 mix the working-pair populations through the doubly stochastic
/// transition block.
pub fn corner_energies(params: &ModelParams, p: f64) -> (f64, f64, f64, f64) {
    let spec1 = model::spectrum(params, params.h1);
    let spec2 = model::spectrum(params, params.h2);
    let pop1 = model::thermal_populations(&spec1, params.beta1());
    let pop2 = model::thermal_populations(&spec2, params.beta2());

    let thermal = |spec: &model::Spectrum, pop: &model::ThermalPopulations| {
        spec.eps1 * pop.p1 + spec.eps2 * pop.p2 + spec.eps3 * pop.p3 + spec.eps4 * pop.p4
    };
    let e1 = thermal(&spec1, &pop1);
    let e3 = thermal(&spec2, &pop2);

    let mixed = |spec: &model::Spectrum, pop: &model::ThermalPopulations| {
        spec.eps1 * (pop.p1 * p + pop.p4 * (1.0 - p))
            + spec.eps2 * pop.p2
            + spec.eps3 * pop.p3
            + spec.eps4 * (pop.p1 * (1.0 - p) + pop.p4 * p)
    };
    let e2 = mixed(&spec2, &pop1);
    let e4 = mixed(&spec1, &pop2);

    (e1, e2, e3, e4)
}

/// Work and heat of the full cycle at adiabaticity `p`.
pub fn stroke_energetics(params: &ModelParams, p: f64) -> StrokeEnergetics {
    let spec1 = model::spectrum(params, params.h1);
    let spec2 = model::spectrum(params, params.h2);
    let eps3 = spec1.eps3;
    let f1 = model::work_function(params.beta1(), spec1.eps4, eps3);
    let f2 = model::work_function(params.beta2(), spec2.eps4, eps3);

    let na = 2.0 * (1.0 - p);
    let w12_ad = f1 * (spec1.eps4 - spec2.eps4);
    let w12_na = na * f1 * spec2.eps4;
    let w21_ad = f2 * (spec2.eps4 - spec1.eps4);
    let w21_na = na * f2 * spec1.eps4;

    let pop1 = model::thermal_populations(&spec1, params.beta1());
    let pop2 = model::thermal_populations(&spec2, params.beta2());
    let dp2 = pop1.p2 - pop2.p2;
    let dp3 = pop1.p3 - pop2.p3;
    let q1_ad = (dp3 - dp2) * eps3 + (f2 - f1) * spec1.eps4;
    let q2_ad = (dp2 - dp3) * eps3 + (f1 - f2) * spec2.eps4;

    let (e1, e2, e3, e4) = corner_energies(params, p);

    StrokeEnergetics {
        e1,
        e2,
        e3,
        e4,
        w12_ad,
        w12_na,
        w21_ad,
        w21_na,
        w12: w12_ad + w12_na,
        w21: w21_ad + w21_na,
        q1_ad,
        q1_na: -w21_na,
        q2_ad,
        q2_na: -w12_na,
        q1: e1 - e4,
        q2: e3 - e2,
    }
}

/// Sign tolerance for regime classification: energy exchanges within this
/// band of zero must not be assigned a zone label, since boundaries are
/// measure-zero and roundoff would flip them nondeterministically.
pub fn sign_tolerance(params: &ModelParams) -> f64 {
    1e-12 * model::spectrum(params, params.h1).eps4.max(1.0)
}

fn sign_with_tolerance(value: f64, tol: f64) -> i8 {
    if value > tol {
        1
    } else if value < -tol {
        -1
    } else {
        0
    }
}

/// Assign the operating regime from the signs of `(Q1, Q2, W_cyc)` under the
/// applicable bath ordering.
pub fn classify(params: &ModelParams, energetics: &StrokeEnergetics) -> CycleOutcome {
    classify_at(params, energetics, f64::NAN)
}

fn classify_at(params: &ModelParams, energetics: &StrokeEnergetics, p: f64) -> CycleOutcome {
    let tol = sign_tolerance(params);
    let w_cyc = energetics.w_cyc();
    let sq1 = sign_with_tolerance(energetics.q1, tol);
    let sq2 = sign_with_tolerance(energetics.q2, tol);
    let sw = sign_with_tolerance(w_cyc, tol);

    let rotation = if params.t1 > params.t2 {
        Some(Rotation::Regular)
    } else if params.t2 > params.t1 {
        Some(Rotation::CounterRotating)
    } else {
        None
    };

    let regime = match rotation {
        None => Regime::Degenerate,
        Some(rot) => {
            if sq1 == 0 || sq2 == 0 || sw == 0 {
                Regime::Degenerate
            } else {
                let signs = (sq1, sq2, sw);
                match rot {
                    Rotation::Regular => match signs {
                        (1, -1, -1) => Regime::Engine,
                        (-1, 1, 1) => Regime::Refrigerator,
                        (1, -1, 1) => Regime::Accelerator,
                        (-1, -1, 1) => Regime::Heater,
                        _ => Regime::Degenerate,
                    },
                    Rotation::CounterRotating => match signs {
                        (-1, 1, -1) => Regime::Engine,
                        (1, -1, 1) => Regime::Refrigerator,
                        (-1, 1, 1) => Regime::Accelerator,
                        (-1, -1, 1) => Regime::Heater,
                        _ => Regime::Degenerate,
                    },
                }
            }
        }
    };

    let efficiency = if regime == Regime::Engine {
        Some(efficiency_unchecked(params, energetics))
    } else {
        None
    };

    CycleOutcome {
        p,
        energetics: *energetics,
        w_cyc,
        regime,
        rotation,
        efficiency,
        oracle_deviation: None,
    }
}

fn efficiency_unchecked(params: &ModelParams, energetics: &StrokeEnergetics) -> f64 {
    let q_hot = if params.t1 > params.t2 {
        energetics.q1
    } else {
        energetics.q2
    };
    -energetics.w_cyc() / q_hot
}

/// Engine efficiency `-W_cyc / Q_hot`, absent for non-engine outcomes.
pub fn efficiency(params: &ModelParams, energetics: &StrokeEnergetics) -> Option<f64> {
    classify(params, energetics).efficiency
}

/// Evaluate the full cycle at an explicit adiabaticity parameter.
pub fn outcome_at(params: &ModelParams, p: f64) -> CycleOutcome {
    let energetics = stroke_energetics(params, p);
    classify_at(params, &energetics, p)
}

// Relative tolerance for the schedule-path consistency check against the
// density-matrix propagation.
const ORACLE_CHECK_TOL: f64 = 1e-8;
// Propagator error budget backing that check.
const ORACLE_CHECK_PROPAGATOR_TOL: f64 = 1e-9;

/// Run one complete cycle.
///
/// With an explicit adiabaticity the closed forms are evaluated directly
/// (any `p` in `[0, 1]` is accepted; physical schedules only reach down to
/// the quench value). With a schedule, the adiabaticity is obtained by
/// integrating the amplitude equations and the corner energies are
/// cross-checked against brute-force density-matrix propagation.
pub fn run_cycle(params: &ModelParams, drive: Drive) -> Result<CycleOutcome> {
    params.validate()?;
    match drive {
        Drive::Adiabaticity(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams {
                    field: "p",
                    message: format!("adiabaticity must lie in [0, 1], got {p}"),
                });
            }
            Ok(outcome_at(params, p))
        }
        Drive::Schedule(schedule) => {
            let p = adiabaticity(params, &schedule)?;
            let mut outcome = outcome_at(params, p);
            let deviation = oracle_deviation(params, &schedule)?;
            if deviation > ORACLE_CHECK_TOL {
                return Err(Error::EnergeticsMismatch {
                    deviation,
                    tol: ORACLE_CHECK_TOL,
                });
            }
            outcome.oracle_deviation = Some(deviation);
            Ok(outcome)
        }
    }
}

/// Max relative deviation between closed-form corner energies (evaluated at
/// the propagator's own adiabaticity) and the density-matrix propagation.
pub fn oracle_deviation(params: &ModelParams, schedule: &FieldSchedule) -> Result<f64> {
    let oracle = density_matrix_cycle(params, schedule, ORACLE_CHECK_PROPAGATOR_TOL)?;
    let (e1, e2, e3, e4) = corner_energies(params, oracle.p);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    Ok(rel(e1, oracle.e1)
        .max(rel(e2, oracle.e2))
        .max(rel(e3, oracle.e3))
        .max(rel(e4, oracle.e4)))
}

/// Adiabaticity threshold at which the nonadiabatic contribution overturns
/// the sign of the expansion work: `W21 >= 0` exactly for `P` at or below
/// it, and the quench adiabaticity always sits strictly above it.
///
/// Algebraically this is the same ratio as [`model::p_min`]; it is kept as
/// its own entry point because it answers a different question (sign of the
/// expansion work rather than engine existence).
pub fn inversion_bound(params: &ModelParams) -> f64 {
    let eps4_1 = model::spectrum(params, params.h1).eps4;
    let eps4_2 = model::spectrum(params, params.h2).eps4;
    0.5 * (1.0 + eps4_2 / eps4_1)
}
