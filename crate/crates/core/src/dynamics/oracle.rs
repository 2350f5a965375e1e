//! Brute-force propagation of the full 4x4 Schrödinger equation in the
//! product basis: per-step matrix exponentials of the midpoint Hamiltonian,
//! with the step size chosen from the local commutator bound. Unconditionally
//! unitary up to roundoff and fully independent of the amplitude-equation
//! path, which makes it the reference the closed forms are checked against.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use super::FieldSchedule;
use crate::error::{Error, Result};
use crate::model::{self, ModelParams};

/// Default error budget (propagator operator norm) for oracle runs.
pub const ORACLE_TOL: f64 = 1e-7;

const UNITARITY_TOL: f64 = 1e-9;
const MAX_STEPS: usize = 20_000_000;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Sense of the stroke: forward drives `h1 -> h2`, reversed retraces the
/// same field values backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reversed,
}

impl Direction {
    /// Field endpoints `(start, end)` for this direction.
    fn endpoints(&self, s: &FieldSchedule) -> (f64, f64) {
        match self {
            Direction::Forward => (s.h1, s.h2),
            Direction::Reversed => (s.h2, s.h1),
        }
    }

    fn field(&self, s: &FieldSchedule, t: f64) -> (f64, f64) {
        match self {
            Direction::Forward => s.eval_unchecked(t),
            Direction::Reversed => {
                let (h, dh) = s.eval_unchecked(s.tau - t);
                (h, -dh)
            }
        }
    }

    fn second_derivative(&self, s: &FieldSchedule, t: f64) -> f64 {
        match self {
            Direction::Forward => s.second_derivative(t),
            Direction::Reversed => s.second_derivative(s.tau - t),
        }
    }
}

/// Full stroke propagator in the product basis together with the extracted
/// adiabaticity parameter.
#[derive(Clone, Debug)]
pub struct PropagatorResult {
    /// Survival probability of the lower working level.
    pub p: f64,
    /// The 4x4 unitary in the product basis.
    pub u: Matrix4<Complex64>,
    pub tau: f64,
    pub unitarity_defect: f64,
    pub steps: usize,
}

pub fn schrodinger_oracle(
    params: &ModelParams,
    schedule: &FieldSchedule,
    direction: Direction,
) -> Result<PropagatorResult> {
    schrodinger_oracle_with_tol(params, schedule, direction, ORACLE_TOL)
}

pub fn schrodinger_oracle_with_tol(
    params: &ModelParams,
    schedule: &FieldSchedule,
    direction: Direction,
    tol: f64,
) -> Result<PropagatorResult> {
    let tau = schedule.tau;
    let delta_abs = params.anisotropy().abs();
    let eps_rate = tol / tau;

    let mut u: Matrix4<Complex64> = Matrix4::identity();
    let mut t = 0.0;
    let mut steps = 0usize;

    while t < tau {
        if steps >= MAX_STEPS {
            return Err(Error::PropagatorStepLimit {
                steps,
                max_steps: MAX_STEPS,
            });
        }
        steps += 1;

        // Local third-order error of the midpoint exponential:
        // dt^3 (||[H, H']||/12 + ||H''||/24).
        let (_, hdot) = direction.field(schedule, t);
        let hdd = direction.second_derivative(schedule, t);
        let comm = 4.0 * SQRT_2 * delta_abs * hdot.abs();
        let curv = 2.0 * SQRT_2 * hdd.abs();
        let rate = comm / 12.0 + curv / 24.0;
        let mut dt = if rate > 0.0 {
            (eps_rate / rate).sqrt()
        } else {
            f64::INFINITY
        };
        dt = dt.min(tau / 8.0).min(tau - t);

        let (h_mid, _) = direction.field(schedule, t + 0.5 * dt);
        let eig = SymmetricEigen::new(model::hamiltonian(params, h_mid));
        let vecs = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));

        // U <- V diag(e^{-i E dt}) V^T U
        let mut w = vecs.transpose() * u;
        for i in 0..4 {
            let phase = Complex64::from_polar(1.0, -eig.eigenvalues[i] * dt);
            for j in 0..4 {
                w[(i, j)] *= phase;
            }
        }
        u = vecs * w;
        t += dt;
    }

    let unitarity_defect = (u.adjoint() * u - Matrix4::<Complex64>::identity()).norm();
    if unitarity_defect > UNITARITY_TOL {
        return Err(Error::UnitarityDefect {
            defect: unitarity_defect,
            tol: UNITARITY_TOL,
            steps,
        });
    }

    let (h_start, h_end) = direction.endpoints(schedule);
    let start = model::energy_eigenvectors(params, h_start);
    let end = model::energy_eigenvectors(params, h_end);
    let p = sandwich(&u, &end[0], &start[0]).norm_sqr();

    Ok(PropagatorResult {
        p,
        u,
        tau,
        unitarity_defect,
        steps,
    })
}

/// Matrix element `<bra| U |ket>` for real basis vectors.
pub(crate) fn sandwich(
    u: &Matrix4<Complex64>,
    bra: &Vector4<f64>,
    ket: &Vector4<f64>,
) -> Complex64 {
    let mut amp = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            amp += bra[i] * u[(i, j)] * ket[j];
        }
    }
    amp
}

/// Transition probabilities `|<eps_i(end)| U |eps_j(start)>|^2` between the
/// analytic eigenbases at the stroke endpoints.
pub fn transition_probabilities(
    params: &ModelParams,
    schedule: &FieldSchedule,
    direction: Direction,
    u: &Matrix4<Complex64>,
) -> Matrix4<f64> {
    let (h_start, h_end) = direction.endpoints(schedule);
    let start = model::energy_eigenvectors(params, h_start);
    let end = model::energy_eigenvectors(params, h_end);
    Matrix4::from_fn(|i, j| sandwich(u, &end[i], &start[j]).norm_sqr())
}

/// Gibbs state of a real symmetric Hamiltonian, built through its numeric
/// eigendecomposition with the ground-state energy shifted out.
pub(crate) fn gibbs_density(hmat: &Matrix4<f64>, beta: f64) -> Matrix4<Complex64> {
    let eig = SymmetricEigen::new(*hmat);
    let e_min = eig.eigenvalues.min();
    let weights = eig.eigenvalues.map(|e| (-beta * (e - e_min)).exp());
    let z = weights.sum();
    let mut rho = Matrix4::<f64>::zeros();
    for k in 0..4 {
        let v = eig.eigenvectors.column(k);
        rho += (weights[k] / z) * v * v.transpose();
    }
    rho.map(|x| Complex64::new(x, 0.0))
}

/// Mean internal energies around the cycle obtained by evolving the Gibbs
/// states with the brute-force propagators and tracing against the endpoint
/// Hamiltonians.
#[derive(Clone, Copy, Debug)]
pub struct CycleEnergiesOracle {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    /// Adiabaticity extracted from the forward propagator.
    pub p: f64,
}

pub fn density_matrix_cycle(
    params: &ModelParams,
    schedule: &FieldSchedule,
    tol: f64,
) -> Result<CycleEnergiesOracle> {
    let h1 = model::hamiltonian(params, schedule.h1);
    let h2 = model::hamiltonian(params, schedule.h2);
    let h1c = h1.map(|x| Complex64::new(x, 0.0));
    let h2c = h2.map(|x| Complex64::new(x, 0.0));

    let rho1 = gibbs_density(&h1, params.beta1());
    let rho3 = gibbs_density(&h2, params.beta2());

    let forward = schrodinger_oracle_with_tol(params, schedule, Direction::Forward, tol)?;
    let reversed = schrodinger_oracle_with_tol(params, schedule, Direction::Reversed, tol)?;

    let rho2 = forward.u * rho1 * forward.u.adjoint();
    let rho4 = reversed.u * rho3 * reversed.u.adjoint();

    Ok(CycleEnergiesOracle {
        e1: (rho1 * h1c).trace().re,
        e2: (rho2 * h2c).trace().re,
        e3: (rho3 * h2c).trace().re,
        e4: (rho4 * h1c).trace().re,
        p: forward.p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_amplitudes, ScheduleKind, WorkingLevel};
    use approx::assert_abs_diff_eq;

    fn fig2_params() -> ModelParams {
        ModelParams::new(10.0, 2.0, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn quench_propagator_is_identity() {
        let params = fig2_params().with_tau(1e-10);
        let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
        let res = schrodinger_oracle(&params, &s, Direction::Forward).unwrap();
        let defect = (res.u - Matrix4::<Complex64>::identity()).norm();
        assert!(defect < 1e-8, "defect = {defect:.3e}");
    }

    #[test]
    fn oracle_agrees_with_amplitude_integration() {
        for tau in [0.01, 0.1, 1.0, 5.0] {
            let params = fig2_params().with_tau(tau);
            let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
            let p_ode = integrate_amplitudes(&params, &s, WorkingLevel::Lower)
                .unwrap()
                .c1
                .norm_sqr();
            let p_oracle = schrodinger_oracle(&params, &s, Direction::Forward)
                .unwrap()
                .p;
            assert!(
                (p_ode - p_oracle).abs() < 1e-6,
                "tau = {tau}: {p_ode} vs {p_oracle}"
            );
        }
    }

    #[test]
    fn oracle_amplitudes_match_phase_convention() {
        // The amplitude path factors out the dynamical phase; putting it back
        // must reproduce the raw propagator matrix elements.
        let params = fig2_params().with_tau(0.8);
        let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
        let state = integrate_amplitudes(&params, &s, WorkingLevel::Lower).unwrap();
        let res = schrodinger_oracle_with_tol(&params, &s, Direction::Forward, 1e-9).unwrap();
        let start = model::energy_eigenvectors(&params, params.h1);
        let end = model::energy_eigenvectors(&params, params.h2);

        let amp1 = sandwich(&res.u, &end[0], &start[0]);
        let expected1 = state.c1 * Complex64::from_polar(1.0, state.theta1);
        assert!((amp1 - expected1).norm() < 1e-7, "c1 phase mismatch");

        let amp4 = sandwich(&res.u, &end[3], &start[0]);
        let expected4 = state.c4 * Complex64::from_polar(1.0, -state.theta1);
        assert!((amp4 - expected4).norm() < 1e-7, "c4 phase mismatch");
    }

    #[test]
    fn idle_levels_do_not_mix() {
        let params = ModelParams::new(10.0, 2.6, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
        let res = schrodinger_oracle(&params, &s, Direction::Forward).unwrap();
        let probs = transition_probabilities(&params, &s, Direction::Forward, &res.u);
        for other in [0, 3] {
            assert!(probs[(other, 1)] < 1e-9);
            assert!(probs[(other, 2)] < 1e-9);
            assert!(probs[(1, other)] < 1e-9);
            assert!(probs[(2, other)] < 1e-9);
        }
        // Transition block of the working pair is doubly stochastic.
        assert_abs_diff_eq!(probs[(0, 0)], probs[(3, 3)], epsilon = 1e-9);
        assert_abs_diff_eq!(probs[(0, 3)], probs[(3, 0)], epsilon = 1e-9);
        assert_abs_diff_eq!(probs[(0, 0)] + probs[(3, 0)], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn oracle_self_converges_under_tighter_tolerance() {
        let params = fig2_params().with_tau(2.0);
        let s = FieldSchedule::from_params(&params, ScheduleKind::SqrtLinear);
        let loose = schrodinger_oracle_with_tol(&params, &s, Direction::Forward, 1e-6).unwrap();
        let tight = schrodinger_oracle_with_tol(&params, &s, Direction::Forward, 1e-10).unwrap();
        assert!((loose.p - tight.p).abs() < 1e-6);
        assert!((loose.u - tight.u).norm() < 1e-5);
        assert!(loose.steps < tight.steps);
    }

    #[test]
    fn gibbs_density_matches_closed_form_populations() {
        let params = fig2_params();
        let beta = 0.7;
        let rho = gibbs_density(&model::hamiltonian(&params, params.h1), beta);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
        let spec = model::spectrum(&params, params.h1);
        let pops = model::thermal_populations(&spec, beta);
        let vecs = model::energy_eigenvectors(&params, params.h1);
        for (v, expected) in vecs.iter().zip(pops.as_array()) {
            let vc = v.map(|x| Complex64::new(x, 0.0));
            let occupancy = (vc.adjoint() * rho * vc)[(0, 0)].re;
            assert_abs_diff_eq!(occupancy, expected, epsilon = 1e-10);
        }
    }
}
