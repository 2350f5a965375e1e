//! Seeded, randomized invariant suites covering every module: closed forms
//! against the eigensolver, the generator-function properties, the two
//! dynamics paths against each other, microreversibility, cycle energetics
//! against density-matrix propagation, and the monotonicity results.
//!
//! Each check is deterministic in the seed, so the command-line `verify`
//! run prints an identical report on every invocation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cycle;
use crate::dynamics::{
    self, schrodinger_oracle_with_tol, Direction, FieldSchedule, ScheduleKind, WorkingLevel,
};
use crate::model::{self, ModelParams};

/// Outcome of one named invariant check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    /// Largest observed deviation (or violation margin) across samples.
    pub worst: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, samples: usize, worst: f64, tol: f64, detail: String) -> Self {
        Self {
            name,
            passed: worst <= tol,
            samples,
            worst,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Sample counts for one suite run. The defaults keep a desk run short;
/// the acceptance suite raises the dynamics-heavy counts.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub closed_form_samples: usize,
    pub g_samples: usize,
    pub dynamics_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            closed_form_samples: 2000,
            g_samples: 10_000,
            dynamics_samples: 8,
        }
    }
}

/// Run every check with the given seed.
pub fn run_full_suite(seed: u64, config: SuiteConfig) -> VerifyReport {
    let n = config.closed_form_samples;
    let g = config.g_samples;
    let d = config.dynamics_samples;
    let checks = vec![
        check_spectrum_vs_eigensolver(seed, n),
        check_g_range_and_zero(seed, g),
        check_g_limits(seed, g),
        check_g_monotone_x(seed, g),
        check_g_single_stationary_x(seed, (g / 20).max(1)),
        check_g_monotone_y(seed, g),
        check_g_scaling(seed, g),
        check_work_function_routes(seed, n),
        check_quench_above_p_min(seed, n),
        check_c_of_p_monotone(seed, (n / 10).max(1)),
        check_first_law(seed, n),
        check_inversion_bound(seed, n),
        check_engine_condition(seed, n),
        check_quench_limit(seed, d),
        check_ode_vs_oracle(seed, d),
        check_microreversibility(seed, d),
        check_idle_decoupling(seed, d.min(6)),
        check_energetics_vs_oracle(seed, d),
        check_efficiency_monotone_p(seed, 20.max(d)),
    ];
    VerifyReport { seed, checks }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(stream))
}

fn draw_params(rng: &mut impl Rng) -> ModelParams {
    let jx = rng.random_range(0.0..12.0);
    let jy = rng.random_range(0.0..12.0);
    let h2 = rng.random_range(0.3..3.0);
    let h1 = h2 + rng.random_range(0.5..4.0);
    let t1 = rng.random_range(0.05..5.0);
    let t2 = rng.random_range(0.05..5.0);
    ModelParams {
        jx,
        jy,
        h1,
        h2,
        t1,
        t2,
        tau: 1.0,
    }
}

pub fn check_spectrum_vs_eigensolver(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let params = draw_params(&mut rng);
        let h = rng.random_range(0.0..8.0);
        let mut closed = model::spectrum(&params, h).as_array();
        closed.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let eig = nalgebra::SymmetricEigen::new(model::hamiltonian(&params, h));
        let mut numeric = [
            eig.eigenvalues[0],
            eig.eigenvalues[1],
            eig.eigenvalues[2],
            eig.eigenvalues[3],
        ];
        numeric.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (c, e) in closed.iter().zip(numeric.iter()) {
            worst = worst.max((c - e).abs());
        }
    }
    CheckOutcome::new(
        "spectrum-vs-eigensolver",
        samples,
        worst,
        1e-10,
        format!("max |closed - eigensolver| = {worst:.3e}"),
    )
}

fn draw_xy(rng: &mut impl Rng) -> (f64, f64) {
    (rng.random_range(1e-6..50.0), rng.random_range(1e-6..5.0))
}

/// Signed violation of `a > b` with a relative dead band: positive values
/// mean the inequality failed by more than rounding can explain.
fn strict_greater_violation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1e-300);
    (b - a) / scale
}

pub fn check_g_range_and_zero(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 2);
    let mut worst: f64 = f64::NEG_INFINITY;
    for y in [0.0, 0.5, 1.0, 3.0] {
        if model::work_function_scaled(0.0, y) != 0.0 {
            worst = worst.max(1.0);
        }
    }
    for _ in 0..samples {
        let (x, y) = draw_xy(&mut rng);
        let g = model::work_function_scaled(x, y);
        if g <= 0.0 {
            worst = worst.max(1.0);
        }
        // Strict g < 1 through the cancellation-free complement.
        let complement = model::work_function_scaled_complement(x, y);
        if complement <= 0.0 {
            worst = worst.max(1.0);
        }
        worst = worst.max(-g).max(g - 1.0);
    }
    CheckOutcome::new(
        "g-range-and-zero",
        samples,
        worst,
        0.0,
        format!("violation margin = {worst:.3e}"),
    )
}

pub fn check_g_limits(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let y: f64 = rng.random_range(0.0..5.0);
        if (y - 1.0).abs() < 1e-3 {
            continue;
        }
        if y < 1.0 {
            // Large-argument limit is 1: the complement must be tiny.
            let x = 60.0 / (1.0 - y);
            worst = worst.max(model::work_function_scaled_complement(x, y));
        } else {
            let x = 60.0 / (y - 1.0);
            worst = worst.max(model::work_function_scaled(x, y));
        }
    }
    worst = worst.max((model::work_function_scaled(50.0, 1.0) - 0.5).abs());
    CheckOutcome::new(
        "g-limits",
        samples,
        worst,
        1e-15,
        format!("max distance from limiting value = {worst:.3e}"),
    )
}

pub fn check_g_monotone_x(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 4);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x: f64 = rng.random_range(1e-6..50.0);
        let y: f64 = rng.random_range(0.0..1.0);
        let (lo, hi) = (x, x * 1.05);
        // In the saturated regime the direct values round together, so
        // compare through the complement (g rising means it falls).
        let violation = if model::work_function_scaled(x, y) > 0.5 {
            let a = model::work_function_scaled_complement(lo, y);
            let b = model::work_function_scaled_complement(hi, y);
            strict_greater_violation(a, b)
        } else {
            let a = model::work_function_scaled(hi, y);
            let b = model::work_function_scaled(lo, y);
            strict_greater_violation(a, b)
        };
        worst = worst.max(violation);
    }
    CheckOutcome::new(
        "g-monotone-x",
        samples,
        worst,
        1e-12,
        format!("worst relative violation = {worst:.3e}"),
    )
}

pub fn check_g_monotone_y(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 5);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let (x, y) = draw_xy(&mut rng);
        let y_hi = y * 1.05 + 1e-4;
        let violation = if model::work_function_scaled(x, y) > 0.5 {
            let a = model::work_function_scaled_complement(x, y_hi);
            let b = model::work_function_scaled_complement(x, y);
            strict_greater_violation(a, b)
        } else {
            let a = model::work_function_scaled(x, y);
            let b = model::work_function_scaled(x, y_hi);
            strict_greater_violation(a, b)
        };
        worst = worst.max(violation);
    }
    CheckOutcome::new(
        "g-monotone-y",
        samples,
        worst,
        1e-12,
        format!("worst relative violation = {worst:.3e}"),
    )
}

pub fn check_g_single_stationary_x(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 6);
    let mut bad = 0usize;
    for _ in 0..samples.max(1) {
        let y: f64 = rng.random_range(1.02..5.0);
        // Difference signs along an x grid: one rise-to-fall switch and no
        // fall-to-rise anywhere.
        let axis: Vec<f64> = (0..400).map(|i| 0.02 + 49.0 * i as f64 / 399.0).collect();
        let mut signs = Vec::new();
        for w in axis.windows(2) {
            let a = model::work_function_scaled(w[0], y);
            let b = model::work_function_scaled(w[1], y);
            let diff = b - a;
            if diff.abs() > 1e-12 * a.abs().max(b.abs()) {
                signs.push(diff > 0.0);
            }
        }
        let switches = signs.windows(2).filter(|w| w[0] != w[1]).count();
        let ok = switches == 1 && signs.first() == Some(&true) && signs.last() == Some(&false);
        if !ok {
            bad += 1;
        }
    }
    CheckOutcome::new(
        "g-single-stationary-x",
        samples,
        bad as f64,
        0.0,
        format!("{bad} y-draws with a second stationary point"),
    )
}

pub fn check_g_scaling(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 7);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x: f64 = rng.random_range(1e-4..30.0);
        let y: f64 = rng.random_range(1e-4..5.0);
        let r: f64 = rng.random_range(1.001..3.0);
        let big = model::work_function_scaled(r * x, y);
        let small = model::work_function_scaled(x, r * y);
        let violation = if big.min(small) > 0.5 {
            let a = model::work_function_scaled_complement(x, r * y);
            let b = model::work_function_scaled_complement(r * x, y);
            strict_greater_violation(a, b)
        } else {
            strict_greater_violation(big, small)
        };
        worst = worst.max(violation);
    }
    CheckOutcome::new(
        "g-scaling",
        samples,
        worst,
        1e-12,
        format!("worst relative violation of g(rx,y) > g(x,ry) = {worst:.3e}"),
    )
}

pub fn check_work_function_routes(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 8);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let beta = rng.random_range(1e-3..200.0);
        let eps4 = rng.random_range(1e-3..15.0);
        let eps3 = rng.random_range(0.0..25.0);
        let f = model::work_function(beta, eps4, eps3);
        let spec = model::Spectrum {
            eps1: -eps4,
            eps2: -eps3,
            eps3,
            eps4,
        };
        let pops = model::thermal_populations(&spec, beta);
        worst = worst.max((f - (pops.p1 - pops.p4)).abs());
        let g = model::work_function_scaled(beta * eps4, eps3 / eps4);
        if (f - g).abs() > 0.0 {
            worst = worst.max((f - g).abs() / f.abs().max(1e-300));
        }
    }
    CheckOutcome::new(
        "work-function-routes",
        samples,
        worst,
        1e-12,
        format!("max route disagreement = {worst:.3e}"),
    )
}

pub fn check_quench_above_p_min(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 9);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let params = draw_params(&mut rng);
        let quench = model::quench_adiabaticity(&params);
        let floor = model::p_min(&params);
        let bound = cycle::inversion_bound(&params);
        // Chain: p_min < inversion bound < quench <= 1.
        worst = worst.max(floor - bound).max(bound - quench);
        worst = worst.max(0.5 - quench).max(quench - 1.0);
    }
    CheckOutcome::new(
        "quench-above-p-min",
        samples,
        worst,
        0.0,
        format!("worst margin violation = {worst:.3e}"),
    )
}

pub fn check_c_of_p_monotone(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 10);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let params = draw_params(&mut rng);
        let mut prev = model::c_of_p(&params, 0.5);
        for k in 1..=100 {
            let p = 0.5 + 0.005 * k as f64;
            let c = model::c_of_p(&params, p);
            worst = worst.max(prev - c);
            prev = c;
        }
        worst = worst.max((model::c_of_p(&params, 1.0) - 1.0).abs() - 1e-12);
        worst = worst.max(model::c_of_p(&params, model::p_min(&params)).abs() - 1e-12);
    }
    CheckOutcome::new(
        "c-of-p-monotone",
        samples,
        worst,
        0.0,
        format!("worst monotonicity/endpoint violation = {worst:.3e}"),
    )
}

pub fn check_first_law(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 11);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let params = draw_params(&mut rng);
        let p = rng.random_range(0.0..1.0);
        let e = cycle::stroke_energetics(&params, p);
        worst = worst.max(e.first_law_residual().abs());
        // Heat splits agree with the energy-difference route.
        worst = worst.max((e.q1 - e.q1_ad - e.q1_na).abs());
        worst = worst.max((e.q2 - e.q2_ad - e.q2_na).abs());
    }
    CheckOutcome::new(
        "first-law",
        samples,
        worst,
        1e-10,
        format!("max |W_cyc + Q1 + Q2| = {worst:.3e}"),
    )
}

pub fn check_inversion_bound(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 12);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let params = draw_params(&mut rng);
        let quench = model::quench_adiabaticity(&params);
        let bound = cycle::inversion_bound(&params);
        worst = worst.max(bound - quench);
        // At or above the quench value the expansion stroke extracts work.
        let p = rng.random_range(quench..=1.0);
        worst = worst.max(cycle::stroke_energetics(&params, p).w21);
        // Below the bound its sign is inverted.
        let p_low = rng.random_range(0.0..bound);
        worst = worst.max(-cycle::stroke_energetics(&params, p_low).w21);
    }
    CheckOutcome::new(
        "inversion-bound-w21",
        samples,
        worst,
        0.0,
        format!("worst violation of the expansion-work sign threshold = {worst:.3e}"),
    )
}

pub fn check_engine_condition(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 13);
    let mut bad = 0usize;
    for _ in 0..samples {
        let params = draw_params(&mut rng);
        let p = rng.random_range(0.5..1.0);
        let e = cycle::stroke_energetics(&params, p);
        let spec1 = model::spectrum(&params, params.h1);
        let spec2 = model::spectrum(&params, params.h2);
        let f1 = model::work_function(params.beta1(), spec1.eps4, spec1.eps3);
        let f2 = model::work_function(params.beta2(), spec2.eps4, spec2.eps3);
        let lhs = e.w_cyc();
        let rhs = f1 - model::c_of_p(&params, p) * f2;
        // Both must carry the same sign away from the boundary band.
        let tol = cycle::sign_tolerance(&params);
        if lhs.abs() > tol && rhs.abs() > tol && (lhs < 0.0) != (rhs < 0.0) {
            bad += 1;
        }
    }
    CheckOutcome::new(
        "engine-condition",
        samples,
        bad as f64,
        0.0,
        format!("{bad} samples where the sign of W_cyc disagrees with f1 < c(P) f2"),
    )
}

pub fn check_quench_limit(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 14);
    let draws: Vec<ModelParams> = (0..samples)
        .map(|_| draw_params(&mut rng).with_tau(1e-4))
        .collect();
    let worst = draws
        .par_iter()
        .map(|params| {
            let s = FieldSchedule::from_params(params, ScheduleKind::SqrtLinear);
            match dynamics::integrate_amplitudes(params, &s, WorkingLevel::Lower) {
                Ok(state) => (state.c1.norm_sqr() - model::quench_adiabaticity(params)).abs(),
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max);
    CheckOutcome::new(
        "quench-limit",
        samples,
        worst,
        1e-3,
        format!("max |P(1e-4) - quench overlap| = {worst:.3e}"),
    )
}

pub fn check_ode_vs_oracle(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 15);
    let draws: Vec<ModelParams> = (0..samples)
        .map(|_| {
            let tau = 10f64.powf(rng.random_range(-3.0..1.7));
            draw_params(&mut rng).with_tau(tau)
        })
        .collect();
    let worst = draws
        .par_iter()
        .map(|params| {
            let s = FieldSchedule::from_params(params, ScheduleKind::SqrtLinear);
            let p_ode = match dynamics::adiabaticity(params, &s) {
                Ok(p) => p,
                Err(_) => return f64::INFINITY,
            };
            match dynamics::schrodinger_oracle(params, &s, Direction::Forward) {
                Ok(res) => (p_ode - res.p).abs(),
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max);
    CheckOutcome::new(
        "ode-vs-oracle",
        samples,
        worst,
        1e-6,
        format!("max |P_ode - P_oracle| = {worst:.3e}"),
    )
}

pub fn check_microreversibility(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 16);
    let draws: Vec<ModelParams> = (0..samples)
        .map(|_| {
            let tau = 10f64.powf(rng.random_range(-2.0..0.0));
            draw_params(&mut rng).with_tau(tau)
        })
        .collect();
    let worst = draws
        .par_iter()
        .map(|params| {
            let s = FieldSchedule::from_params(params, ScheduleKind::SqrtLinear);
            match dynamics::microreversibility_check(params, &s, 2e-9) {
                Ok(report) => report.probability_deviation.max(report.symmetry_defect),
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max);
    CheckOutcome::new(
        "microreversibility",
        samples,
        worst,
        1e-8,
        format!("max probability/symmetry deviation = {worst:.3e}"),
    )
}

pub fn check_idle_decoupling(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 17);
    let draws: Vec<ModelParams> = (0..samples.max(1))
        .map(|_| {
            let tau = 10f64.powf(rng.random_range(-2.0..0.3));
            draw_params(&mut rng).with_tau(tau)
        })
        .collect();
    let worst = draws
        .par_iter()
        .map(|params| {
            let s = FieldSchedule::from_params(params, ScheduleKind::SqrtLinear);
            let res = match schrodinger_oracle_with_tol(params, &s, Direction::Forward, 1e-9) {
                Ok(res) => res,
                Err(_) => return f64::INFINITY,
            };
            let probs =
                dynamics::transition_probabilities(params, &s, Direction::Forward, &res.u);
            let mut leak: f64 = 0.0;
            for idle in [1usize, 2] {
                for other in 0..4 {
                    if other != idle {
                        leak = leak.max(probs[(other, idle)]).max(probs[(idle, other)]);
                    }
                }
            }
            leak
        })
        .reduce(|| 0.0, f64::max);
    CheckOutcome::new(
        "idle-decoupling",
        samples,
        worst,
        1e-9,
        format!("max leakage out of the idle levels = {worst:.3e}"),
    )
}

pub fn check_energetics_vs_oracle(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 18);
    let draws: Vec<ModelParams> = (0..samples)
        .map(|_| {
            let tau = 10f64.powf(rng.random_range(-1.7..-0.2));
            draw_params(&mut rng).with_tau(tau)
        })
        .collect();
    let worst = draws
        .par_iter()
        .map(|params| {
            let s = FieldSchedule::from_params(params, ScheduleKind::SqrtLinear);
            match cycle::oracle_deviation(params, &s) {
                Ok(dev) => dev,
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max);
    CheckOutcome::new(
        "energetics-vs-oracle",
        samples,
        worst,
        1e-8,
        format!("max relative corner-energy deviation = {worst:.3e}"),
    )
}

pub fn check_efficiency_monotone_p(seed: u64, wanted: usize) -> CheckOutcome {
    let mut rng = rng_for(seed, 19);
    let mut found = 0usize;
    let mut worst: f64 = f64::NEG_INFINITY;
    let delta = 1e-5;
    let mut attempts = 0usize;
    while found < wanted && attempts < wanted * 4000 {
        attempts += 1;
        let params = draw_params(&mut rng);
        let floor = model::p_min(&params);
        let p = rng.random_range((floor + 0.02).min(0.99)..0.9999);
        let lo = cycle::outcome_at(&params, p - delta);
        let hi = cycle::outcome_at(&params, p + delta);
        if lo.regime == cycle::Regime::Engine && hi.regime == cycle::Regime::Engine {
            found += 1;
            worst = worst.max(lo.efficiency.unwrap() - hi.efficiency.unwrap());
        }
    }
    let mut outcome = CheckOutcome::new(
        "efficiency-monotone-p",
        found,
        worst,
        0.0,
        format!("{found} engine points; worst decrease of eta with P = {worst:.3e}"),
    );
    if found < wanted {
        outcome.passed = false;
        outcome.detail = format!("only {found} of {wanted} engine points found");
    }
    outcome
}

/// Canonical string form of a report, used to confirm deterministic replay.
pub fn report_fingerprint(report: &VerifyReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        out.push_str(&format!("{}:{}:{:.17e};", c.name, c.passed, c.worst));
    }
    out
}
