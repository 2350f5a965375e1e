//! Command execution: translate a resolved configuration into core-library
//! calls and emit the records.

use serde::Serialize;

use xyotto::analysis::{self, VariedBath};
use xyotto::cycle::{self, Drive};
use xyotto::dynamics::FieldSchedule;
use xyotto::verify::{self, SuiteConfig};

use crate::config::{Command, RunConfig};
use crate::output::{self, fmt_float, fmt_opt_float, Record};
use crate::CliError;

pub enum RunStatus {
    Success,
    VerifyFailed,
}

pub fn execute(config: &RunConfig) -> Result<RunStatus, CliError> {
    match config.command {
        Command::Cycle => cycle_command(config),
        Command::Sweep => sweep_command(config),
        Command::Adiabaticity => adiabaticity_command(config),
        Command::Efficiency => efficiency_command(config),
        Command::Gap => gap_command(config),
        Command::Verify => return verify_command(config),
    }?;
    Ok(RunStatus::Success)
}

fn numerical(e: xyotto::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

#[derive(Serialize)]
struct CycleRecord {
    p: f64,
    regime: String,
    w12: f64,
    w21: f64,
    w_cyc: f64,
    q1: f64,
    q2: f64,
    eta: Option<f64>,
    w12_ad: f64,
    w12_na: f64,
    w21_ad: f64,
    w21_na: f64,
    oracle_deviation: Option<f64>,
}

impl Record for CycleRecord {
    fn csv_header() -> &'static [&'static str] {
        &[
            "p", "regime", "w12", "w21", "w_cyc", "q1", "q2", "eta", "w12_ad", "w12_na",
            "w21_ad", "w21_na", "oracle_deviation",
        ]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            fmt_float(self.p),
            self.regime.clone(),
            fmt_float(self.w12),
            fmt_float(self.w21),
            fmt_float(self.w_cyc),
            fmt_float(self.q1),
            fmt_float(self.q2),
            fmt_opt_float(self.eta),
            fmt_float(self.w12_ad),
            fmt_float(self.w12_na),
            fmt_float(self.w21_ad),
            fmt_float(self.w21_na),
            fmt_opt_float(self.oracle_deviation),
        ]
    }
}

fn cycle_command(config: &RunConfig) -> Result<(), CliError> {
    let params = config.model.expect("cycle config carries the model");
    let drive = match &config.p {
        Some(ps) => Drive::Adiabaticity(ps[0]),
        None => Drive::Schedule(FieldSchedule::new(
            config.schedule_kind.expect("resolved schedule kind"),
            params.h1,
            params.h2,
            config.tau.expect("resolved tau"),
        )),
    };
    let outcome = cycle::run_cycle(&params, drive).map_err(numerical)?;
    let record = CycleRecord {
        p: outcome.p,
        regime: outcome.regime_label(),
        w12: outcome.energetics.w12,
        w21: outcome.energetics.w21,
        w_cyc: outcome.w_cyc,
        q1: outcome.energetics.q1,
        q2: outcome.energetics.q2,
        eta: outcome.efficiency,
        w12_ad: outcome.energetics.w12_ad,
        w12_na: outcome.energetics.w12_na,
        w21_ad: outcome.energetics.w21_ad,
        w21_na: outcome.energetics.w21_na,
        oracle_deviation: outcome.oracle_deviation,
    };
    output::emit(config, &output::render(config, &[record])?)
}

#[derive(Serialize)]
struct SweepRecord {
    t1: f64,
    t2: f64,
    regime: String,
    w_cyc: f64,
    q1: f64,
    q2: f64,
    eta: Option<f64>,
}

impl Record for SweepRecord {
    fn csv_header() -> &'static [&'static str] {
        &["t1", "t2", "regime", "w_cyc", "q1", "q2", "eta"]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            fmt_float(self.t1),
            fmt_float(self.t2),
            self.regime.clone(),
            fmt_float(self.w_cyc),
            fmt_float(self.q1),
            fmt_float(self.q2),
            fmt_opt_float(self.eta),
        ]
    }
}

fn sweep_command(config: &RunConfig) -> Result<(), CliError> {
    let params = config.model.expect("sweep config carries the model");
    let p = match &config.p {
        Some(ps) => ps[0],
        None => {
            let schedule = FieldSchedule::new(
                config.schedule_kind.expect("resolved schedule kind"),
                params.h1,
                params.h2,
                config.tau.expect("resolved tau"),
            );
            xyotto::dynamics::adiabaticity(&params, &schedule).map_err(numerical)?
        }
    };
    let t1_axis = config.grid_t1.expect("resolved grid").values();
    let t2_axis = config.grid_t2.expect("resolved grid").values();
    let map = analysis::sweep_regimes(&params, p, &t1_axis, &t2_axis);
    let records: Vec<SweepRecord> = map
        .cells
        .iter()
        .map(|c| SweepRecord {
            t1: c.t1,
            t2: c.t2,
            regime: cycle::regime_label(c.regime, c.rotation),
            w_cyc: c.w_cyc,
            q1: c.q1,
            q2: c.q2,
            eta: c.eta,
        })
        .collect();
    output::emit(config, &output::render(config, &records)?)
}

#[derive(Serialize)]
struct AdiabaticityRecord {
    tau: f64,
    p: Option<f64>,
    error: Option<String>,
}

impl Record for AdiabaticityRecord {
    fn csv_header() -> &'static [&'static str] {
        &["tau", "p", "error"]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            fmt_float(self.tau),
            fmt_opt_float(self.p),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

fn adiabaticity_command(config: &RunConfig) -> Result<(), CliError> {
    let params = config.model.expect("adiabaticity config carries the model");
    let taus = config.grid_tau.expect("resolved tau grid").values();
    let kind = config.schedule_kind.expect("resolved schedule kind");
    let curve = analysis::adiabaticity_curve(&params, &taus, kind);
    // A failed point is a numerical failure of the run as a whole.
    if let Some(bad) = curve.iter().find(|pt| pt.error.is_some()) {
        return Err(CliError::Numerical(format!(
            "adiabaticity integration failed at tau = {}: {}",
            bad.tau,
            bad.error.clone().unwrap_or_default()
        )));
    }
    let records: Vec<AdiabaticityRecord> = curve
        .into_iter()
        .map(|pt| AdiabaticityRecord {
            tau: pt.tau,
            p: pt.p,
            error: pt.error,
        })
        .collect();
    output::emit(config, &output::render(config, &records)?)
}

#[derive(Serialize)]
struct EfficiencyRecord {
    p: f64,
    t: f64,
    eta: Option<f64>,
}

impl Record for EfficiencyRecord {
    fn csv_header() -> &'static [&'static str] {
        &["p", "t", "eta"]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            fmt_float(self.p),
            fmt_float(self.t),
            fmt_opt_float(self.eta),
        ]
    }
}

fn efficiency_command(config: &RunConfig) -> Result<(), CliError> {
    let params = config.model.expect("efficiency config carries the model");
    let p_values = config.p.clone().expect("resolved p list");
    let (vary, axis) = match (&config.grid_t1, &config.grid_t2) {
        (Some(g), None) => (VariedBath::T1, g.values()),
        (None, Some(g)) => (VariedBath::T2, g.values()),
        _ => unreachable!("resolver enforces exactly one grid"),
    };
    let series = analysis::efficiency_curve(&params, vary, &axis, &p_values);
    let mut records = Vec::new();
    for s in &series {
        for pt in &s.points {
            records.push(EfficiencyRecord {
                p: s.p,
                t: pt.t,
                eta: pt.eta,
            });
        }
    }
    output::emit(config, &output::render(config, &records)?)
}

#[derive(Serialize)]
struct GapRecord {
    p: f64,
    t1_a: f64,
    t2_0: f64,
    t1_b: f64,
    width: f64,
    min_wcyc_inside: f64,
    t2_samples: usize,
}

impl Record for GapRecord {
    fn csv_header() -> &'static [&'static str] {
        &[
            "p",
            "t1_a",
            "t2_0",
            "t1_b",
            "width",
            "min_wcyc_inside",
            "t2_samples",
        ]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            fmt_float(self.p),
            fmt_float(self.t1_a),
            fmt_float(self.t2_0),
            fmt_float(self.t1_b),
            fmt_float(self.width),
            fmt_float(self.min_wcyc_inside),
            self.t2_samples.to_string(),
        ]
    }
}

fn gap_command(config: &RunConfig) -> Result<(), CliError> {
    let params = config.model.expect("gap config carries the model");
    let p_values = config.p.clone().expect("resolved p list");
    let t1_axis = config.grid_t1.expect("resolved grid").values();
    let t2_axis = config.grid_t2.expect("resolved grid").values();
    let mut records = Vec::new();
    for &p in &p_values {
        let report =
            analysis::find_temperature_gap(&params, p, &t1_axis, &t2_axis).map_err(numerical)?;
        records.push(GapRecord {
            p,
            t1_a: report.t1_a,
            t2_0: report.t2_0,
            t1_b: report.t1_b,
            width: report.width(),
            min_wcyc_inside: report.min_wcyc_inside,
            t2_samples: report.t2_samples,
        });
    }
    output::emit(config, &output::render(config, &records)?)
}

#[derive(Serialize)]
struct VerifyRecord {
    name: String,
    passed: bool,
    samples: usize,
    worst: f64,
    detail: String,
}

impl Record for VerifyRecord {
    fn csv_header() -> &'static [&'static str] {
        &["name", "passed", "samples", "worst", "detail"]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            self.passed.to_string(),
            self.samples.to_string(),
            fmt_float(self.worst),
            self.detail.clone(),
        ]
    }
}

fn verify_command(config: &RunConfig) -> Result<RunStatus, CliError> {
    let report = verify::run_full_suite(config.seed, SuiteConfig::default());
    for check in &report.checks {
        println!(
            "{} {} ({} samples): {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.samples,
            check.detail
        );
    }
    let records: Vec<VerifyRecord> = report
        .checks
        .iter()
        .map(|c| VerifyRecord {
            name: c.name.to_string(),
            passed: c.passed,
            samples: c.samples,
            worst: c.worst,
            detail: c.detail.clone(),
        })
        .collect();
    if config.out.is_some() {
        output::emit(config, &output::render(config, &records)?)?;
    }
    if report.all_passed() {
        println!("verify: all {} checks passed (seed {})", records.len(), config.seed);
        Ok(RunStatus::Success)
    } else {
        let failed = records.iter().filter(|r| !r.passed).count();
        println!(
            "verify: {failed} of {} checks failed (seed {})",
            records.len(),
            config.seed
        );
        Ok(RunStatus::VerifyFailed)
    }
}
