//! Closed-form static quantities of the two-qubit XY working substance:
//! spectrum, eigenbasis mixing amplitudes, Gibbs populations, the work
//! function `f` together with its dimensionless generator `g(x, y)`, and the
//! adiabaticity thresholds that govern engine operation.
//!
//! Everything here is a pure function of the cycle configuration; the
//! time-dependent machinery lives in [`crate::dynamics`].

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full configuration of one cycle: couplings, field endpoints, bath
/// temperatures and stroke duration. Units follow the convention
/// hbar = k_B = mu = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Coupling strength along x.
    pub jx: f64,
    /// Coupling strength along y.
    pub jy: f64,
    /// Field at the start of the forward stroke (high endpoint).
    pub h1: f64,
    /// Field at the end of the forward stroke (low endpoint).
    pub h2: f64,
    /// Temperature of the bath attached while the Hamiltonian sits at `h1`.
    pub t1: f64,
    /// Temperature of the bath attached while the Hamiltonian sits at `h2`.
    pub t2: f64,
    /// Duration of each unitary stroke.
    pub tau: f64,
}

impl ModelParams {
    pub fn new(jx: f64, jy: f64, h1: f64, h2: f64, t1: f64, t2: f64, tau: f64) -> Result<Self> {
        let params = Self {
            jx,
            jy,
            h1,
            h2,
            t1,
            t2,
            tau,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        fn check(field: &'static str, value: f64, ok: bool, message: &str) -> Result<()> {
            if !value.is_finite() {
                return Err(Error::InvalidParams {
                    field,
                    message: format!("must be finite, got {value}"),
                });
            }
            if !ok {
                return Err(Error::InvalidParams {
                    field,
                    message: format!("{message}, got {value}"),
                });
            }
            Ok(())
        }
        check("jx", self.jx, self.jx >= 0.0, "must be nonnegative")?;
        check("jy", self.jy, self.jy >= 0.0, "must be nonnegative")?;
        check("h2", self.h2, self.h2 > 0.0, "must be positive")?;
        check("h1", self.h1, self.h1 > self.h2, "must satisfy h1 > h2")?;
        check("t1", self.t1, self.t1 > 0.0, "must be positive")?;
        check("t2", self.t2, self.t2 > 0.0, "must be positive")?;
        check("tau", self.tau, self.tau > 0.0, "must be positive")?;
        Ok(())
    }

    /// Inverse temperature of bath 1.
    pub fn beta1(&self) -> f64 {
        1.0 / self.t1
    }

    /// Inverse temperature of bath 2.
    pub fn beta2(&self) -> f64 {
        1.0 / self.t2
    }

    /// Coupling anisotropy `jx - jy`; the off-diagonal element that mixes the
    /// two field-dependent levels.
    pub fn anisotropy(&self) -> f64 {
        self.jx - self.jy
    }

    pub fn with_temperatures(mut self, t1: f64, t2: f64) -> Self {
        self.t1 = t1;
        self.t2 = t2;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }
}

/// The four eigenenergies at a given field value. Levels 1 and 4 move with
/// the field ("working" pair), levels 2 and 3 do not ("idle" pair).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
}

impl Spectrum {
    pub fn as_array(&self) -> [f64; 4] {
        [self.eps1, self.eps2, self.eps3, self.eps4]
    }
}

/// Real mixing amplitudes of the working pair at a given field value,
/// normalized so that `alpha_plus^2 + alpha_minus^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenBasis {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

/// Gibbs probabilities of the four levels at a fixed inverse temperature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalPopulations {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl ThermalPopulations {
    pub fn as_array(&self) -> [f64; 4] {
        [self.p1, self.p2, self.p3, self.p4]
    }
}

/// Hamiltonian matrix at field `h` in the product basis
/// {|uu>, |ud>, |du>, |dd>}.
pub fn hamiltonian(params: &ModelParams, h: f64) -> Matrix4<f64> {
    let delta = params.anisotropy();
    let sigma = params.jx + params.jy;
    let two_h = 2.0 * h;
    Matrix4::new(
        two_h, 0.0, 0.0, delta, //
        0.0, 0.0, sigma, 0.0, //
        0.0, sigma, 0.0, 0.0, //
        delta, 0.0, 0.0, -two_h,
    )
}

/// Closed-form eigenenergies at field `h`:
/// `eps4 = sqrt(4 h^2 + (jx - jy)^2)`, `eps3 = jx + jy`, with the lower two
/// levels mirroring them.
pub fn spectrum(params: &ModelParams, h: f64) -> Spectrum {
    let delta = params.anisotropy();
    let eps4 = (4.0 * h * h + delta * delta).sqrt();
    let eps3 = params.jx + params.jy;
    Spectrum {
        eps1: -eps4,
        eps2: -eps3,
        eps3,
        eps4,
    }
}

/// Mixing amplitudes of the working pair at field `h`.
///
/// For `jx == jy` the {|uu>, |dd>} block is already diagonal; the amplitudes
/// are pinned to (1, 0) by continuity from the anisotropic case.
pub fn eigenbasis(params: &ModelParams, h: f64) -> EigenBasis {
    let delta = params.anisotropy();
    if delta == 0.0 {
        return EigenBasis {
            alpha_plus: 1.0,
            alpha_minus: 0.0,
        };
    }
    let r = (4.0 * h * h + delta * delta).sqrt();
    let ratio = 2.0 * h / r;
    EigenBasis {
        alpha_plus: (0.5 * (1.0 + ratio)).sqrt(),
        alpha_minus: (0.5 * (1.0 - ratio)).sqrt(),
    }
}

/// Analytic eigenvectors `[v1, v2, v3, v4]` in the product basis, indexed by
/// level. The sign convention follows the sign of `jx - jy` so the vectors
/// vary continuously with the field.
pub fn energy_eigenvectors(params: &ModelParams, h: f64) -> [Vector4<f64>; 4] {
    let basis = eigenbasis(params, h);
    let s = if params.anisotropy() < 0.0 { -1.0 } else { 1.0 };
    let ap = basis.alpha_plus;
    let am = s * basis.alpha_minus;
    let q = std::f64::consts::FRAC_1_SQRT_2;
    [
        Vector4::new(am, 0.0, 0.0, -ap),
        Vector4::new(0.0, q, -q, 0.0),
        Vector4::new(0.0, q, q, 0.0),
        Vector4::new(ap, 0.0, 0.0, am),
    ]
}

/// Gibbs weights over the four levels, exponent-shifted by the ground-state
/// energy so that large `beta` stays finite.
pub fn thermal_populations(spec: &Spectrum, beta: f64) -> ThermalPopulations {
    let energies = spec.as_array();
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights = energies.map(|e| (-beta * (e - e_min)).exp());
    let z: f64 = weights.iter().sum();
    ThermalPopulations {
        p1: weights[0] / z,
        p2: weights[1] / z,
        p3: weights[2] / z,
        p4: weights[3] / z,
    }
}

// Exponent scale below which the naive sinh/cosh expressions neither overflow
// nor lose the tiny-argument behavior of sinh.
const DIRECT_EXP_LIMIT: f64 = 30.0;

/// Work function `f = p1 - p4` of a thermal state, in closed form:
/// `sinh(beta eps4) / (cosh(beta eps3) + cosh(beta eps4))`.
pub fn work_function(beta: f64, eps4: f64, eps3: f64) -> f64 {
    let a = beta * eps4;
    let b = beta * eps3;
    let m = a.max(b);
    if m <= DIRECT_EXP_LIMIT {
        a.sinh() / (b.cosh() + a.cosh())
    } else {
        let num = (a - m).exp() - (-a - m).exp();
        let den = (b - m).exp() + (-b - m).exp() + (a - m).exp() + (-a - m).exp();
        num / den
    }
}

/// Dimensionless generator of the work function:
/// `g(x, y) = (e^x - e^-x) / (e^xy + e^-xy + e^x + e^-x)`, with
/// `f = g(beta eps4, eps3 / eps4)`.
pub fn work_function_scaled(x: f64, y: f64) -> f64 {
    let xy = x * y;
    let m = x.max(xy);
    if m <= DIRECT_EXP_LIMIT {
        x.sinh() / (xy.cosh() + x.cosh())
    } else {
        let num = (x - m).exp() - (-x - m).exp();
        let den = (xy - m).exp() + (-xy - m).exp() + (x - m).exp() + (-x - m).exp();
        num / den
    }
}

/// Complement `1 - g(x, y)` evaluated without cancellation, so the strict
/// bound `g < 1` stays resolvable where `g` itself rounds to 1.
pub fn work_function_scaled_complement(x: f64, y: f64) -> f64 {
    let xy = x * y;
    let m = x.max(xy);
    if m <= DIRECT_EXP_LIMIT {
        (xy.cosh() + (-x).exp()) / (xy.cosh() + x.cosh())
    } else {
        let num = (xy - m).exp() + (-xy - m).exp() + 2.0 * (-x - m).exp();
        let den = (xy - m).exp() + (-xy - m).exp() + (x - m).exp() + (-x - m).exp();
        num / den
    }
}

/// Survival probability of the lower working level under an instantaneous
/// field change from `h1` to `h2` (the quench limit of the adiabaticity).
pub fn quench_adiabaticity(params: &ModelParams) -> f64 {
    let d2 = params.anisotropy().powi(2);
    let num = 4.0 * params.h1 * params.h2 + d2;
    let den = ((4.0 * params.h1 * params.h1 + d2) * (4.0 * params.h2 * params.h2 + d2)).sqrt();
    0.5 * (1.0 + num / den)
}

/// Adiabaticity floor below which no engine operation is possible at any
/// pair of bath temperatures.
pub fn p_min(params: &ModelParams) -> f64 {
    let eps4_1 = spectrum(params, params.h1).eps4;
    let eps4_2 = spectrum(params, params.h2).eps4;
    0.5 * (1.0 + eps4_2 / eps4_1)
}

/// Ratio `c(P)` entering the nonadiabatic engine condition
/// `f^(1) < c(P) f^(2)`. Monotonically increasing in `P`, with `c(1) = 1`
/// and `c(p_min) = 0`.
pub fn c_of_p(params: &ModelParams, p: f64) -> f64 {
    let eps4_1 = spectrum(params, params.h1).eps4;
    let eps4_2 = spectrum(params, params.h2).eps4;
    let gap = eps4_1 - eps4_2;
    let na = 2.0 * (1.0 - p);
    (gap - na * eps4_1) / (gap + na * eps4_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fig2_params() -> ModelParams {
        ModelParams::new(10.0, 2.0, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    /// Independent oracle: sorted eigenvalues of the explicit 4x4 matrix.
    fn eigensolver_energies(params: &ModelParams, h: f64) -> [f64; 4] {
        let eig = nalgebra::SymmetricEigen::new(hamiltonian(params, h));
        let mut vals = [
            eig.eigenvalues[0],
            eig.eigenvalues[1],
            eig.eigenvalues[2],
            eig.eigenvalues[3],
        ];
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    #[test]
    fn params_validation_rejects_bad_fields() {
        assert!(ModelParams::new(10.0, 2.0, 1.0, 4.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(10.0, 2.0, 4.0, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(-0.1, 2.0, 4.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(10.0, 2.0, 4.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(10.0, 2.0, 4.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(10.0, f64::NAN, 4.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn spectrum_matches_eigensolver_at_reference_point() {
        let params = fig2_params();
        let spec = spectrum(&params, 4.0);
        assert_abs_diff_eq!(spec.eps4, 11.313708498984761, epsilon = 1e-12);
        assert_eq!(spec.eps3, 12.0);
        assert_eq!(spec.eps1, -spec.eps4);
        assert_eq!(spec.eps2, -spec.eps3);

        let mut closed = spec.as_array();
        closed.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let numeric = eigensolver_energies(&params, 4.0);
        for (c, n) in closed.iter().zip(numeric.iter()) {
            assert_abs_diff_eq!(c, n, epsilon = 1e-10);
        }
    }

    #[test]
    fn spectrum_equal_couplings_is_pure_field() {
        let params = ModelParams::new(3.0, 3.0, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(spectrum(&params, 2.5).eps4, 5.0);
    }

    #[test]
    fn spectrum_strong_coupling_point() {
        let params = ModelParams::new(10.0, 2.6, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let spec = spectrum(&params, 1.0);
        assert_abs_diff_eq!(spec.eps4, (4.0f64 + 54.76).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(spec.eps4, 7.6655, epsilon = 1e-4);
    }

    #[test]
    fn eigenbasis_zero_field_is_symmetric() {
        let params = fig2_params();
        let basis = eigenbasis(&params, 0.0);
        assert_abs_diff_eq!(
            basis.alpha_plus,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            basis.alpha_minus,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn eigenbasis_large_field_polarizes() {
        let params = fig2_params();
        let basis = eigenbasis(&params, 1e8);
        assert!(basis.alpha_plus > 1.0 - 1e-12);
        assert!(basis.alpha_minus < 1e-4);
    }

    #[test]
    fn quench_overlap_matches_closed_form() {
        let params = fig2_params();
        let v_h1 = energy_eigenvectors(&params, params.h1);
        let v_h2 = energy_eigenvectors(&params, params.h2);
        let overlap = v_h2[0].dot(&v_h1[0]).powi(2);
        assert_abs_diff_eq!(overlap, 0.929, epsilon = 1e-3);
        assert_abs_diff_eq!(overlap, quench_adiabaticity(&params), epsilon = 1e-12);
    }

    #[test]
    fn eigenvectors_diagonalize_hamiltonian() {
        let params = ModelParams::new(10.0, 2.6, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        for &h in &[0.0, 0.3, 1.0, 4.0] {
            let hm = hamiltonian(&params, h);
            let spec = spectrum(&params, h).as_array();
            let vecs = energy_eigenvectors(&params, h);
            for (v, e) in vecs.iter().zip(spec.iter()) {
                assert!((hm * v - *e * v).norm() < 1e-12, "h = {h}, eps = {e}");
            }
        }
    }

    #[test]
    fn thermal_populations_infinite_temperature_limit() {
        let spec = spectrum(&fig2_params(), 4.0);
        let pops = thermal_populations(&spec, 1e-14);
        for p in pops.as_array() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-10);
        }
    }

    #[test]
    fn thermal_populations_strong_coupling_ground_state() {
        // jx jy > h^2 puts the idle singlet below the working pair.
        let params = ModelParams::new(10.0, 2.6, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let spec = spectrum(&params, 4.0);
        assert!(spec.eps2 < spec.eps1);
        let pops = thermal_populations(&spec, 100.0);
        assert!(pops.p2 > 0.999);
    }

    #[test]
    fn thermal_populations_survive_low_temperature() {
        // Weak coupling (jx jy < h^2) keeps level 1 at the bottom.
        let params = ModelParams::new(0.01, 2.0, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let spec = spectrum(&params, 4.0);
        let pops = thermal_populations(&spec, 1e3);
        let sum: f64 = pops.as_array().iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        assert!(pops.p1 > 0.999_999);
    }

    #[test]
    fn work_function_saturates_toward_one_for_dominant_eps4() {
        // eps4 above eps3: the zero-temperature limit drives f to 1.
        let f = work_function(1e3, 5.0, 2.0);
        assert!(f > 1.0 - 1e-12, "f = {f}");
    }

    #[test]
    fn work_function_vanishes_for_dominant_eps3() {
        let f = work_function(1e3, 2.0, 5.0);
        assert!(f < 1e-12, "f = {f}");
    }

    #[test]
    fn work_function_vanishes_at_infinite_temperature() {
        let f = work_function(1e-14, 5.0, 2.0);
        assert!(f >= 0.0 && f < 1e-10);
    }

    #[test]
    fn work_function_equals_population_difference() {
        for &(beta, eps4, eps3) in &[
            (0.3, 11.313708498984761, 12.0),
            (2.0, 8.246211251235321, 12.0),
            (17.0, 3.0, 1.0),
            (900.0, 0.05, 0.02),
        ] {
            let spec = Spectrum {
                eps1: -eps4,
                eps2: -eps3,
                eps3,
                eps4,
            };
            let pops = thermal_populations(&spec, beta);
            let f = work_function(beta, eps4, eps3);
            assert_abs_diff_eq!(f, pops.p1 - pops.p4, epsilon = 1e-12);
        }
    }

    #[test]
    fn scaled_form_matches_work_function() {
        for &(beta, eps4, eps3) in &[
            (0.5, 11.3, 12.0),
            (3.0, 8.2, 12.0),
            (40.0, 2.0, 5.0),
            (1e3, 5.0, 2.0),
        ] {
            let f = work_function(beta, eps4, eps3);
            let g = work_function_scaled(beta * eps4, eps3 / eps4);
            let rel = (f - g).abs() / f.abs().max(1e-300);
            assert!(rel < 1e-12, "beta={beta} rel={rel}");
        }
    }

    #[test]
    fn g_vanishes_at_zero_x() {
        for &y in &[0.0, 0.3, 1.0, 4.0] {
            assert_eq!(work_function_scaled(0.0, y), 0.0);
        }
    }

    #[test]
    fn g_limit_on_diagonal_is_half() {
        assert_abs_diff_eq!(work_function_scaled(40.0, 1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn g_scaling_inequality_example() {
        assert!(work_function_scaled(2.0, 1.5) > work_function_scaled(1.0, 3.0));
    }

    #[test]
    fn g_complement_is_consistent() {
        for &(x, y) in &[(0.5, 0.3), (3.0, 1.0), (10.0, 2.5), (25.0, 0.2)] {
            let g = work_function_scaled(x, y);
            let c = work_function_scaled_complement(x, y);
            assert_abs_diff_eq!(g + c, 1.0, epsilon = 1e-13);
        }
        // Saturated regime: complement must stay positive where g rounds to 1.
        let c = work_function_scaled_complement(50.0, 0.01);
        assert!(c > 0.0 && c < 1e-20);
    }

    #[test]
    fn quench_adiabaticity_reference_values() {
        assert_abs_diff_eq!(quench_adiabaticity(&fig2_params()), 0.929, epsilon = 1e-3);
        let fig5 = ModelParams::new(10.0, 1.6, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(quench_adiabaticity(&fig5), 0.932, epsilon = 1e-3);
        let iso = ModelParams::new(3.0, 3.0, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(quench_adiabaticity(&iso), 1.0);
    }

    #[test]
    fn p_min_reference_value() {
        let params = fig2_params();
        let expected = 0.5 * (1.0 + 8.246211251235321 / 11.313708498984761);
        assert_abs_diff_eq!(p_min(&params), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(p_min(&params), 0.8645, epsilon = 1e-4);
        assert!(p_min(&params) < quench_adiabaticity(&params));
    }

    #[test]
    fn p_min_degenerate_endpoints() {
        // Bypasses `new` on purpose: h1 == h2 is outside the validated domain
        // but the closed form still has the continuity limit 1.
        let params = ModelParams {
            jx: 10.0,
            jy: 2.0,
            h1: 4.0,
            h2: 4.0,
            t1: 1.0,
            t2: 1.0,
            tau: 1.0,
        };
        assert_eq!(p_min(&params), 1.0);
    }

    #[test]
    fn c_of_p_endpoints() {
        let params = fig2_params();
        assert_abs_diff_eq!(c_of_p(&params, 1.0), 1.0, epsilon = 1e-14);
        assert!(c_of_p(&params, p_min(&params)).abs() < 1e-12);
        assert!(c_of_p(&params, p_min(&params) - 0.05) < 0.0);
    }

    #[test]
    fn c_of_p_at_quench_matches_field_ratio() {
        let params = ModelParams::new(10.0, 1.6, 4.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let c = c_of_p(&params, quench_adiabaticity(&params));
        let eps4_1 = spectrum(&params, params.h1).eps4;
        let eps4_2 = spectrum(&params, params.h2).eps4;
        let expected = params.h2 * eps4_1 / (params.h1 * eps4_2);
        let rel = (c - expected).abs() / expected;
        assert!(rel < 1e-12, "rel = {rel}");
        assert_abs_diff_eq!(c, 0.3358, epsilon = 1e-4);
    }

    fn arb_params() -> impl Strategy<Value = ModelParams> {
        (
            0.0f64..12.0,
            0.0f64..12.0,
            0.02f64..8.0,
            1e-3f64..1.0,
        )
            .prop_map(|(jx, jy, h2, frac)| {
                let h1 = h2 / frac.max(1e-3) + 1e-6;
                ModelParams {
                    jx,
                    jy,
                    h1,
                    h2,
                    t1: 1.0,
                    t2: 1.0,
                    tau: 1.0,
                }
            })
    }

    proptest! {
        #[test]
        fn prop_spectrum_matches_eigensolver(params in arb_params(), h in 0.0f64..10.0) {
            let mut closed = spectrum(&params, h).as_array();
            closed.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let numeric = eigensolver_energies(&params, h);
            for (c, n) in closed.iter().zip(numeric.iter()) {
                prop_assert!((c - n).abs() < 1e-10);
            }
        }

        #[test]
        fn prop_eigenbasis_normalized(params in arb_params(), h in 0.0f64..10.0) {
            let basis = eigenbasis(&params, h);
            let norm = basis.alpha_plus.powi(2) + basis.alpha_minus.powi(2);
            prop_assert!((norm - 1.0).abs() < 1e-14);
            prop_assert!(basis.alpha_plus >= 0.0 && basis.alpha_plus <= 1.0);
            prop_assert!(basis.alpha_minus >= 0.0 && basis.alpha_minus <= 1.0);
        }

        #[test]
        fn prop_populations_ordered_and_normalized(params in arb_params(), h in 0.0f64..10.0, beta in 1e-3f64..50.0) {
            let spec = spectrum(&params, h);
            let pops = thermal_populations(&spec, beta);
            let sum: f64 = pops.as_array().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            // Gibbs ordering against sorted energies.
            let mut pairs: Vec<(f64, f64)> = spec
                .as_array()
                .iter()
                .zip(pops.as_array().iter())
                .map(|(&e, &p)| (e, p))
                .collect();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for w in pairs.windows(2) {
                prop_assert!(w[0].1 >= w[1].1 - 1e-15);
            }
        }

        #[test]
        fn prop_quench_exceeds_p_min(params in arb_params()) {
            let q = quench_adiabaticity(&params);
            let floor = p_min(&params);
            prop_assert!(q > 0.5 && q <= 1.0);
            prop_assert!(floor > 0.5 && floor < 1.0);
            prop_assert!(q > floor);
        }

        #[test]
        fn prop_c_of_p_increasing(params in arb_params()) {
            let mut prev = c_of_p(&params, 0.5);
            let mut p: f64 = 0.5;
            while p < 1.0 {
                p += 0.01;
                let c = c_of_p(&params, p.min(1.0));
                prop_assert!(c > prev);
                prev = c;
            }
        }

        #[test]
        fn prop_work_function_routes_agree(beta in 1e-3f64..200.0, eps4 in 1e-3f64..15.0, eps3 in 0.0f64..25.0) {
            let f = work_function(beta, eps4, eps3);
            let spec = Spectrum { eps1: -eps4, eps2: -eps3, eps3, eps4 };
            let pops = thermal_populations(&spec, beta);
            prop_assert!((f - (pops.p1 - pops.p4)).abs() < 1e-12);
            let g = work_function_scaled(beta * eps4, eps3 / eps4);
            let rel = (f - g).abs() / f.abs().max(1e-300);
            prop_assert!(rel < 1e-12 || (f - g).abs() < 1e-300);
        }
    }
}
