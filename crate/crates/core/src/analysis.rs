//! Parameter-space studies: temperature regime maps, adiabaticity and
//! efficiency curves, the engine-threshold solve, and the temperature-gap
//! search with its certificate over the sampled grid.
//!
//! Sweeps are data-parallel over immutable parameter tuples; output ordering
//! is row-major over the axes and independent of worker scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::{self, outcome_at, Regime, Rotation};
use crate::dynamics::{self, FieldSchedule, ScheduleKind};
use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use crate::search;

/// Default temperature window for regime maps.
pub const DEFAULT_T_MIN: f64 = 0.01;
pub const DEFAULT_T_MAX: f64 = 6.0;
pub const DEFAULT_T_COUNT: usize = 201;

/// Uniformly spaced axis including both endpoints.
pub fn linear_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "grid needs at least two points");
    let step = (max - min) / (count - 1) as f64;
    (0..count).map(|i| min + step * i as f64).collect()
}

/// Geometrically spaced axis including both endpoints.
pub fn log_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "grid needs at least two points");
    assert!(min > 0.0 && max > min, "log grid needs 0 < min < max");
    let ratio = (max / min).ln() / (count - 1) as f64;
    (0..count).map(|i| min * (ratio * i as f64).exp()).collect()
}

pub fn default_t_grid() -> Vec<f64> {
    linear_grid(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_T_COUNT)
}

/// One cell of a temperature sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SweepCell {
    pub t1: f64,
    pub t2: f64,
    pub regime: Regime,
    pub rotation: Option<Rotation>,
    pub w_cyc: f64,
    pub q1: f64,
    pub q2: f64,
    pub eta: Option<f64>,
}

/// Rectangular `(T1, T2)` map of regimes and energy exchanges at fixed
/// adiabaticity. Cells are row-major: index `i * t2_axis.len() + j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegimeMap {
    pub t1_axis: Vec<f64>,
    pub t2_axis: Vec<f64>,
    pub cells: Vec<SweepCell>,
    pub params: ModelParams,
    pub p: f64,
}

impl RegimeMap {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.t2_axis.len() + j]
    }

    pub fn engine_cell_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.regime == Regime::Engine)
            .count()
    }

    /// Largest first-law residual across the map.
    pub fn max_first_law_residual(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| (c.w_cyc + c.q1 + c.q2).abs())
            .fold(0.0, f64::max)
    }
}

/// Classify every cell of the `(T1, T2)` grid at a fixed adiabaticity.
/// The temperatures in `params` are ignored; everything else is shared.
pub fn sweep_regimes(params: &ModelParams, p: f64, t1_axis: &[f64], t2_axis: &[f64]) -> RegimeMap {
    let pairs: Vec<(f64, f64)> = t1_axis
        .iter()
        .flat_map(|&t1| t2_axis.iter().map(move |&t2| (t1, t2)))
        .collect();
    let cells: Vec<SweepCell> = pairs
        .par_iter()
        .map(|&(t1, t2)| {
            let local = params.with_temperatures(t1, t2);
            let outcome = outcome_at(&local, p);
            SweepCell {
                t1,
                t2,
                regime: outcome.regime,
                rotation: outcome.rotation,
                w_cyc: outcome.w_cyc,
                q1: outcome.energetics.q1,
                q2: outcome.energetics.q2,
                eta: outcome.efficiency,
            }
        })
        .collect();
    RegimeMap {
        t1_axis: t1_axis.to_vec(),
        t2_axis: t2_axis.to_vec(),
        cells,
        params: *params,
        p,
    }
}

/// 4-connected components of engine cells, as lists of row-major indices.
pub fn engine_regions(map: &RegimeMap) -> Vec<Vec<usize>> {
    let n1 = map.t1_axis.len();
    let n2 = map.t2_axis.len();
    let mut seen = vec![false; map.cells.len()];
    let mut regions = Vec::new();
    for start in 0..map.cells.len() {
        if seen[start] || map.cells[start].regime != Regime::Engine {
            continue;
        }
        let mut region = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(idx) = stack.pop() {
            region.push(idx);
            let (i, j) = (idx / n2, idx % n2);
            let mut push = |ni: usize, nj: usize, stack: &mut Vec<usize>| {
                let nidx = ni * n2 + nj;
                if !seen[nidx] && map.cells[nidx].regime == Regime::Engine {
                    seen[nidx] = true;
                    stack.push(nidx);
                }
            };
            if i > 0 {
                push(i - 1, j, &mut stack);
            }
            if i + 1 < n1 {
                push(i + 1, j, &mut stack);
            }
            if j > 0 {
                push(i, j - 1, &mut stack);
            }
            if j + 1 < n2 {
                push(i, j + 1, &mut stack);
            }
        }
        region.sort_unstable();
        regions.push(region);
    }
    regions
}

/// One point of an adiabaticity curve; integration failures are carried
/// per-point instead of aborting the series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdiabaticityPoint {
    pub tau: f64,
    pub p: Option<f64>,
    pub error: Option<String>,
}

/// `P(tau)` over a grid of stroke durations.
pub fn adiabaticity_curve(
    params: &ModelParams,
    taus: &[f64],
    kind: ScheduleKind,
) -> Vec<AdiabaticityPoint> {
    taus.par_iter()
        .map(|&tau| {
            let local = params.with_tau(tau);
            let schedule = FieldSchedule::from_params(&local, kind);
            match dynamics::adiabaticity(&local, &schedule) {
                Ok(p) => AdiabaticityPoint {
                    tau,
                    p: Some(p),
                    error: None,
                },
                Err(e) => AdiabaticityPoint {
                    tau,
                    p: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Which bath temperature a curve varies; the other stays at its value in
/// the base parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariedBath {
    T1,
    T2,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EfficiencyPoint {
    pub t: f64,
    pub eta: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EfficiencySeries {
    pub p: f64,
    pub points: Vec<EfficiencyPoint>,
}

/// Engine efficiency along a temperature axis, one series per adiabaticity.
/// Non-engine cells carry no efficiency value.
pub fn efficiency_curve(
    params: &ModelParams,
    vary: VariedBath,
    t_axis: &[f64],
    p_values: &[f64],
) -> Vec<EfficiencySeries> {
    p_values
        .iter()
        .map(|&p| {
            let points = t_axis
                .par_iter()
                .map(|&t| {
                    let local = match vary {
                        VariedBath::T1 => params.with_temperatures(t, params.t2),
                        VariedBath::T2 => params.with_temperatures(params.t1, t),
                    };
                    EfficiencyPoint {
                        t,
                        eta: outcome_at(&local, p).efficiency,
                    }
                })
                .collect();
            EfficiencySeries { p, points }
        })
        .collect()
}

/// Largest engine efficiency along a temperature axis: coarse scan followed
/// by a golden-section refinement inside the best bracket. `None` when no
/// engine cell exists on the scan.
pub fn max_engine_efficiency(
    params: &ModelParams,
    vary: VariedBath,
    t_lo: f64,
    t_hi: f64,
    scan_points: usize,
    p: f64,
) -> Option<(f64, f64)> {
    let eta_at = |t: f64| -> f64 {
        let local = match vary {
            VariedBath::T1 => params.with_temperatures(t, params.t2),
            VariedBath::T2 => params.with_temperatures(params.t1, t),
        };
        outcome_at(&local, p)
            .efficiency
            .unwrap_or(f64::NEG_INFINITY)
    };

    let axis = linear_grid(t_lo, t_hi, scan_points.max(3));
    let (best_idx, best_eta) = axis
        .iter()
        .enumerate()
        .map(|(i, &t)| (i, eta_at(t)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
    if best_eta == f64::NEG_INFINITY {
        return None;
    }

    // Refine only when the bracket stays inside the engine window.
    let lo = axis[best_idx.saturating_sub(1)];
    let hi = axis[(best_idx + 1).min(axis.len() - 1)];
    if eta_at(lo) > f64::NEG_INFINITY && eta_at(hi) > f64::NEG_INFINITY && lo < hi {
        let (t, eta) = search::golden_max(eta_at, lo, hi, 1e-10);
        Some((t, eta.max(best_eta)))
    } else {
        Some((axis[best_idx], best_eta))
    }
}

/// Result of the engine-threshold solve in the first bath temperature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThresholdT1 {
    /// Engine operation as `T2 -> 0` exists for every `T1` above this value
    /// (zero when it survives down to arbitrarily small `T1`).
    Finite(f64),
    /// No engine at any `T1` (adiabaticity at or below the floor).
    Unbounded,
}

/// Threshold `T1` above which an engine is possible as `T2 -> 0` in the
/// weak-coupling regime: solves `f^(1)(T1) = c(P)` by bisection, using the
/// monotone decay of the work function in temperature.
pub fn find_threshold_t1(params: &ModelParams, p: f64) -> Result<ThresholdT1> {
    let spec1 = model::spectrum(params, params.h1);
    let y1 = spec1.eps3 / spec1.eps4;
    if y1 > 1.0 {
        return Err(Error::Precondition(format!(
            "threshold solve needs weak coupling (eps3/eps4 <= 1 at h1), got {y1:.6}"
        )));
    }
    if p <= model::p_min(params) {
        return Ok(ThresholdT1::Unbounded);
    }
    let c = model::c_of_p(params, p);
    let f_minus_c = |t1: f64| model::work_function(1.0 / t1, spec1.eps4, spec1.eps3) - c;

    let lo = 1e-9;
    if f_minus_c(lo) <= 0.0 {
        // The work function never reaches c: engine possible at every T1.
        return Ok(ThresholdT1::Finite(0.0));
    }
    let (blo, bhi) = search::expand_bracket_up(f_minus_c, lo, 2.0, 60)?;
    Ok(ThresholdT1::Finite(search::bisect(
        f_minus_c, blo, bhi, 1e-8,
    )?))
}

/// True when the couplings put the idle singlet below the working pair at
/// the high field, the condition for counter-rotating engines.
pub fn counter_rotating_condition(params: &ModelParams) -> bool {
    params.jx * params.jy > params.h1 * params.h1
}

/// Certificate of the engine-free window in `T1` for strong coupling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    /// Temperature of bath 2 that maximizes the work extracted in the
    /// expansion stroke.
    pub t2_0: f64,
    pub t1_a: f64,
    pub t1_b: f64,
    /// Optional `(P, gap width)` series for adiabaticity scans.
    pub widened_vs_p: Option<Vec<(f64, f64)>>,
    /// Smallest `W_cyc` over sampled `(T1 in gap) x (T2 on grid)`; positive
    /// values certify the gap on the sampled grid.
    pub min_wcyc_inside: f64,
    /// Number of `T2` samples behind the certificate (a finite check, not a
    /// proof over all temperatures).
    pub t2_samples: usize,
    pub p: f64,
}

impl GapReport {
    pub fn width(&self) -> f64 {
        self.t1_b - self.t1_a
    }
}

fn w_cyc_at(params: &ModelParams, t1: f64, t2: f64, p: f64) -> f64 {
    cycle::stroke_energetics(&params.with_temperatures(t1, t2), p).w_cyc()
}

/// Locate the `T1` window inside which no engine operation exists, for
/// strong coupling and adiabaticity above the floor.
///
/// The expansion-work maximizer `T2_0` is refined by golden section from the
/// best grid cell; the gap endpoints are the sign changes of
/// `W_cyc(T1, T2_0)` refined by bisection; the certificate samples `T2` on
/// the provided grid only.
pub fn find_temperature_gap(
    params: &ModelParams,
    p: f64,
    t1_axis: &[f64],
    t2_axis: &[f64],
) -> Result<GapReport> {
    if !counter_rotating_condition(params) {
        return Err(Error::Precondition(format!(
            "temperature gap needs strong coupling (jx jy > h1^2), got jx jy = {} vs h1^2 = {}",
            params.jx * params.jy,
            params.h1 * params.h1
        )));
    }
    if p <= model::p_min(params) {
        return Err(Error::Precondition(format!(
            "temperature gap needs P > p_min = {:.6}, got {p}",
            model::p_min(params)
        )));
    }

    // -W21 = f^(2)(T2) times a positive P-dependent constant, so maximizing
    // the extracted expansion work maximizes the work function of bath 2.
    let spec2 = model::spectrum(params, params.h2);
    let f2 = |t2: f64| model::work_function(1.0 / t2, spec2.eps4, spec2.eps3);
    let (grid_best, _) = t2_axis
        .iter()
        .map(|&t2| (t2, f2(t2)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .ok_or_else(|| Error::GapNotFound("empty T2 grid".into()))?;
    let (t2_0, _) = search::golden_max(f2, grid_best / 2.0, grid_best * 2.0, 1e-10);

    // Sign pattern of W_cyc(T1, T2_0) is (- + -): engine below the gap,
    // none inside, engine again above.
    let w = |t1: f64| w_cyc_at(params, t1, t2_0, p);
    let mut crossings = Vec::new();
    for pair in t1_axis.windows(2) {
        if w(pair[0]).signum() != w(pair[1]).signum() {
            crossings.push((pair[0], pair[1]));
        }
    }
    let (t1_a, t1_b) = match crossings.len() {
        0 => {
            return Err(Error::GapNotFound(format!(
                "no sign change of W_cyc along T1 in [{:.4}, {:.4}] at T2_0 = {t2_0:.4}",
                t1_axis.first().unwrap(),
                t1_axis.last().unwrap()
            )))
        }
        1 => {
            // Upper crossing lies beyond the grid: expand geometrically.
            let (a, b) = crossings[0];
            let t1_a = search::bisect(&w, a, b, 1e-8)?;
            let start = *t1_axis.last().unwrap();
            let (ea, eb) = search::expand_bracket_up(&w, start, 2.0, 60)?;
            let t1_b = search::bisect(&w, ea, eb, 1e-8)?;
            (t1_a, t1_b)
        }
        _ => {
            let (a, b) = crossings[0];
            let (c, d) = *crossings.last().unwrap();
            (
                search::bisect(&w, a, b, 1e-8)?,
                search::bisect(&w, c, d, 1e-8)?,
            )
        }
    };

    // Certificate: no engine cell for T1 strictly inside the gap, sampled
    // over the full T2 grid.
    let margin = 1e-6 * (t1_b - t1_a);
    let inner = linear_grid(t1_a + margin, t1_b - margin, 41);
    let min_wcyc_inside = inner
        .par_iter()
        .map(|&t1| {
            t2_axis
                .iter()
                .map(|&t2| w_cyc_at(params, t1, t2, p))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);

    Ok(GapReport {
        t2_0,
        t1_a,
        t1_b,
        widened_vs_p: None,
        min_wcyc_inside,
        t2_samples: t2_axis.len(),
        p,
    })
}

/// Gap searches over a list of adiabaticities, with the `(P, width)` series
/// attached to the report of the first entry.
pub fn find_temperature_gap_vs_p(
    params: &ModelParams,
    p_values: &[f64],
    t1_axis: &[f64],
    t2_axis: &[f64],
) -> Result<GapReport> {
    let mut reports = Vec::with_capacity(p_values.len());
    for &p in p_values {
        reports.push(find_temperature_gap(params, p, t1_axis, t2_axis)?);
    }
    let series: Vec<(f64, f64)> = p_values
        .iter()
        .zip(&reports)
        .map(|(&p, r)| (p, r.width()))
        .collect();
    let mut first = reports.remove(0);
    first.widened_vs_p = Some(series);
    Ok(first)
}

/// Cells where the engine beats the field-ratio efficiency `1 - h2/h1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HighEfficiencyRegion {
    pub p: f64,
    /// `(i, j)` indices into the `t1`/`t2` axes.
    pub cells: Vec<(usize, usize)>,
}

/// Per-adiabaticity cell sets with efficiency above the field-ratio
/// benchmark.
pub fn high_efficiency_region(
    params: &ModelParams,
    p_values: &[f64],
    t1_axis: &[f64],
    t2_axis: &[f64],
) -> Vec<HighEfficiencyRegion> {
    let eta_ref = 1.0 - params.h2 / params.h1;
    p_values
        .iter()
        .map(|&p| {
            let map = sweep_regimes(params, p, t1_axis, t2_axis);
            let cells = map
                .cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.eta.is_some_and(|eta| eta > eta_ref))
                .map(|(idx, _)| (idx / t2_axis.len(), idx % t2_axis.len()))
                .collect();
            HighEfficiencyRegion { p, cells }
        })
        .collect()
}
