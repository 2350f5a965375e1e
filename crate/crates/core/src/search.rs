//! Bisection and golden-section searches used by the parameter-space
//! analyses. All target functions there are continuous and either monotone
//! or single-peaked on the bracketed side.

use crate::error::{Error, Result};

/// Bisection root of `f` on `[lo, hi]`, assuming `f(lo)` and `f(hi)` carry
/// opposite signs. Converges to relative tolerance `rel_tol` on the abscissa.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketFailed(format!(
            "no sign change on [{lo:.6e}, {hi:.6e}] (f: {f_lo:.3e} .. {f_hi:.3e})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= rel_tol * hi.abs().max(lo.abs()) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expand `hi` geometrically from `start` until `f` changes sign relative to
/// `f(start)`, returning the bracketing interval.
pub fn expand_bracket_up<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    factor: f64,
    max_doublings: usize,
) -> Result<(f64, f64)> {
    let f_start = f(start);
    let mut lo = start;
    let mut hi = start;
    for _ in 0..max_doublings {
        hi *= factor;
        if f(hi).signum() != f_start.signum() {
            return Ok((lo, hi));
        }
        lo = hi;
    }
    Err(Error::BracketFailed(format!(
        "no sign change after {max_doublings} expansions from {start:.6e}"
    )))
}

/// Golden-section maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x, f(x))` at the interior optimum.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..200 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
        if (hi - lo).abs() <= rel_tol * (lo.abs() + hi.abs()).max(1e-12) {
            break;
        }
    }
    if fa > fb {
        (a, fa)
    } else {
        (b, fb)
    }
}
