//! Coupled amplitude equations of the working pair, integrated with an
//! embedded Dormand-Prince 5(4) scheme.
//!
//! Only levels 1 and 4 evolve; the idle pair is frozen by the block
//! structure of the Hamiltonian. The state carried here is
//! `(c1, c4, theta1)` with `theta1` the accumulated dynamical phase of the
//! lower working level.

use num_complex::Complex64;

use super::FieldSchedule;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Which working level carries the full initial amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkingLevel {
    /// Level 1, energy `-eps4`.
    Lower,
    /// Level 4, energy `+eps4`.
    Upper,
}

/// Amplitudes of the working pair at the end of a stroke.
#[derive(Clone, Copy, Debug)]
pub struct AmplitudeState {
    pub c1: Complex64,
    pub c4: Complex64,
    /// Dynamical phase of the lower level, `-∫ eps1 dt` up to `t`.
    pub theta1: f64,
    pub t: f64,
    /// Largest deviation of `|c1|^2 + |c4|^2` from 1 over accepted steps.
    pub max_norm_defect: f64,
}

/// Tolerances and step limits for the embedded Runge-Kutta integration.
/// The oscillatory phase factors demand tight control; the system is tiny,
/// so the defaults are aggressive.
#[derive(Clone, Copy, Debug)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

/// Integrate the amplitude equations over the forward stroke starting from
/// level `m`, co-integrating the dynamical phase.
pub fn integrate_amplitudes(
    params: &ModelParams,
    schedule: &FieldSchedule,
    m: WorkingLevel,
) -> Result<AmplitudeState> {
    integrate_amplitudes_with(params, schedule, m, Dopri5Options::default())
}

pub fn integrate_amplitudes_with(
    params: &ModelParams,
    schedule: &FieldSchedule,
    m: WorkingLevel,
    opts: Dopri5Options,
) -> Result<AmplitudeState> {
    let delta = params.anisotropy();
    let d2 = delta * delta;

    // State layout: [Re c1, Im c1, Re c4, Im c4, theta1].
    let rhs = |t: f64, y: &[f64; 5]| -> [f64; 5] {
        let (h, hdot) = schedule.eval_unchecked(t);
        let r2 = 4.0 * h * h + d2;
        let kappa = -delta * hdot / r2;
        let theta = y[4];
        let (sin2, cos2) = (2.0 * theta).sin_cos();
        // c1' = kappa e^{-2 i theta} c4, c4' = -kappa e^{+2 i theta} c1.
        let (c4re, c4im) = (y[2], y[3]);
        let (c1re, c1im) = (y[0], y[1]);
        [
            kappa * (cos2 * c4re + sin2 * c4im),
            kappa * (cos2 * c4im - sin2 * c4re),
            -kappa * (cos2 * c1re - sin2 * c1im),
            -kappa * (cos2 * c1im + sin2 * c1re),
            r2.sqrt(),
        ]
    };

    let y0 = match m {
        WorkingLevel::Lower => [1.0, 0.0, 0.0, 0.0, 0.0],
        WorkingLevel::Upper => [0.0, 0.0, 1.0, 0.0, 0.0],
    };

    let mut max_norm_defect: f64 = 0.0;
    let y = dopri5(rhs, 0.0, schedule.tau, y0, &opts, |_, y| {
        let norm = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
        max_norm_defect = max_norm_defect.max((norm - 1.0).abs());
    })?;

    let state = AmplitudeState {
        c1: Complex64::new(y[0], y[1]),
        c4: Complex64::new(y[2], y[3]),
        theta1: y[4],
        t: schedule.tau,
        max_norm_defect,
    };
    if state.max_norm_defect > 1e-9 {
        return Err(Error::UnitarityDefect {
            defect: state.max_norm_defect,
            tol: 1e-9,
            steps: 0,
        });
    }
    Ok(state)
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (coeff, k) in terms {
        for i in 0..N {
            out[i] += h * coeff * k[i];
        }
    }
    out
}

/// Adaptive Dormand-Prince 5(4) over a fixed-size state, calling
/// `on_accept` after every accepted step.
fn dopri5<const N: usize, F, M>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &Dopri5Options,
    mut on_accept: M,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    M: FnMut(f64, &[f64; N]),
{
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = (span / 100.0).min(span);
    let mut steps = 0usize;

    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::IntegratorStalled {
                t_reached: t,
                tau: t1,
                steps,
                rtol: opts.rtol,
                atol: opts.atol,
            });
        }
        steps += 1;
        h = h.min(t1 - t);

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(t + h, &y_new);

        let mut err_sq = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7; // FSAL
            on_accept(t, &y);
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ScheduleKind;
    use crate::model;
    use approx::assert_abs_diff_eq;

    fn fig2_params() -> ModelParams {
        ModelParams::new(10.0, 2.0, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn dopri5_reproduces_exponential() {
        let y = dopri5(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            3.0,
            [1.0],
            &Dopri5Options::default(),
            |_, _| {},
        )
        .unwrap();
        assert_abs_diff_eq!(y[0], (-3.0f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn dopri5_reports_stall() {
        let opts = Dopri5Options {
            max_steps: 3,
            ..Dopri5Options::default()
        };
        let res = dopri5(
            |t, y: &[f64; 1]| [(20.0 * t).sin() * y[0]],
            0.0,
            10.0,
            [1.0],
            &opts,
            |_, _| {},
        );
        assert!(matches!(res, Err(Error::IntegratorStalled { .. })));
    }

    #[test]
    fn quench_stroke_matches_overlap_formula() {
        let params = fig2_params().with_tau(1e-4);
        let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
        let state = integrate_amplitudes(&params, &s, WorkingLevel::Lower).unwrap();
        let p = state.c1.norm_sqr();
        assert_abs_diff_eq!(p, 0.929, epsilon = 1e-3);
        assert_abs_diff_eq!(p, model::quench_adiabaticity(&params), epsilon = 1e-3);
    }

    #[test]
    fn slow_stroke_is_adiabatic() {
        let params = fig2_params().with_tau(50.0);
        let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
        let state = integrate_amplitudes(&params, &s, WorkingLevel::Lower).unwrap();
        assert!(state.c1.norm_sqr() >= 0.999);
    }

    #[test]
    fn initial_level_symmetry_from_unitarity() {
        for tau in [0.05, 0.7, 3.0] {
            let params = fig2_params().with_tau(tau);
            let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
            let lower = integrate_amplitudes(&params, &s, WorkingLevel::Lower).unwrap();
            let upper = integrate_amplitudes(&params, &s, WorkingLevel::Upper).unwrap();
            assert_abs_diff_eq!(lower.c4.norm_sqr(), upper.c1.norm_sqr(), epsilon = 1e-8);
            assert!(lower.max_norm_defect < 1e-9);
            assert!(upper.max_norm_defect < 1e-9);
        }
    }

    #[test]
    fn frozen_pair_for_equal_couplings() {
        let params = ModelParams::new(3.0, 3.0, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
        let state = integrate_amplitudes(&params, &s, WorkingLevel::Lower).unwrap();
        assert_eq!(state.c1, Complex64::new(1.0, 0.0));
        assert_eq!(state.c4, Complex64::new(0.0, 0.0));
        assert!(state.theta1 > 0.0);
    }
}
