//! Run configuration: JSON file and/or command-line flags, merged with
//! flags taking precedence, then validated into a fully resolved form that
//! is echoed into every output file.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use xyotto::dynamics::ScheduleKind;
use xyotto::model::ModelParams;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Cycle,
    Sweep,
    Adiabaticity,
    Efficiency,
    Gap,
    Verify,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cycle" => Ok(Command::Cycle),
            "sweep" => Ok(Command::Sweep),
            "adiabaticity" => Ok(Command::Adiabaticity),
            "efficiency" => Ok(Command::Efficiency),
            "gap" => Ok(Command::Gap),
            "verify" => Ok(Command::Verify),
            other => Err(format!(
                "unknown command `{other}` (expected cycle, sweep, adiabaticity, efficiency, gap or verify)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

/// Axis specification `min:max:count[:log]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.scale {
            GridScale::Linear => xyotto::analysis::linear_grid(self.min, self.max, self.count),
            GridScale::Log => xyotto::analysis::log_grid(self.min, self.max, self.count),
        }
    }

    fn validate(&self, field: &str) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::config(format!(
                "{field}: grid count must be at least 2, got {}",
                self.count
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(CliError::config(format!(
                "{field}: grid needs min < max, got {}:{}",
                self.min, self.max
            )));
        }
        if self.min <= 0.0 {
            return Err(CliError::config(format!(
                "{field}: grid minimum must be positive, got {}",
                self.min
            )));
        }
        Ok(())
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 3 || parts.len() > 4 {
            return Err(format!(
                "grid `{s}` must be MIN:MAX:COUNT or MIN:MAX:COUNT:log"
            ));
        }
        let min: f64 = parts[0].parse().map_err(|_| format!("bad grid min `{}`", parts[0]))?;
        let max: f64 = parts[1].parse().map_err(|_| format!("bad grid max `{}`", parts[1]))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad grid count `{}`", parts[2]))?;
        let scale = match parts.get(3) {
            None | Some(&"linear") => GridScale::Linear,
            Some(&"log") => GridScale::Log,
            Some(other) => return Err(format!("bad grid scale `{other}` (expected log)")),
        };
        Ok(GridSpec {
            min,
            max,
            count,
            scale,
        })
    }
}

/// Model fields as they appear in a config file; everything optional so
/// flags can fill the gaps.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ModelFile {
    pub jx: Option<f64>,
    pub jy: Option<f64>,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub kind: Option<ScheduleKind>,
    pub tau: Option<f64>,
}

/// One or several adiabaticity values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValues {
    One(f64),
    Many(Vec<f64>),
}

impl PValues {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            PValues::One(p) => vec![*p],
            PValues::Many(v) => v.clone(),
        }
    }
}

/// Raw config file contents.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    #[serde(default)]
    pub model: ModelFile,
    pub schedule: Option<ScheduleFile>,
    pub p: Option<PValues>,
    pub grid_t1: Option<GridSpec>,
    pub grid_t2: Option<GridSpec>,
    pub grid_tau: Option<GridSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::config(format!("malformed config file {}: {e}", path.display()))
        })
    }
}

/// Flag values collected by the argument parser; merged over the file.
#[derive(Clone, Debug, Default)]
pub struct FlagOverrides {
    pub command: Option<String>,
    pub jx: Option<f64>,
    pub jy: Option<f64>,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub tau: Option<f64>,
    pub p: Option<Vec<f64>>,
    pub schedule: Option<ScheduleKind>,
    pub grid_t1: Option<GridSpec>,
    pub grid_t2: Option<GridSpec>,
    pub grid_tau: Option<GridSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

/// Fully resolved run configuration; serialized into output metadata.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule_kind: Option<ScheduleKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_t1: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_t2: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_tau: Option<GridSpec>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
}

const DEFAULT_T_GRID: GridSpec = GridSpec {
    min: 0.01,
    max: 6.0,
    count: 201,
    scale: GridScale::Linear,
};

const DEFAULT_TAU_GRID: GridSpec = GridSpec {
    min: 1e-3,
    max: 50.0,
    count: 60,
    scale: GridScale::Log,
};

fn require(value: Option<f64>, field: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::config(format!("missing required field `{field}`")))
}

/// Merge file and flags (flags win), fill defaults, and validate every
/// invariant the selected command relies on.
pub fn resolve(file: ConfigFile, flags: FlagOverrides) -> Result<RunConfig, CliError> {
    let command_str = flags
        .command
        .or(file.command)
        .ok_or_else(|| CliError::config("missing required field `command`".into()))?;
    let command = Command::from_str(&command_str).map_err(CliError::config)?;

    let format = flags.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let seed = flags.seed.or(file.seed).unwrap_or(0);
    let out = flags.out.or(file.out);

    let p_values = flags
        .p
        .or_else(|| file.p.as_ref().map(|p| p.to_vec()));
    if let Some(ps) = &p_values {
        if ps.is_empty() {
            return Err(CliError::config("`p` must contain at least one value".into()));
        }
        for &p in ps {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::config(format!(
                    "`p` values must lie in [0, 1], got {p}"
                )));
            }
        }
    }

    let file_schedule = file.schedule.unwrap_or(ScheduleFile {
        kind: None,
        tau: None,
    });
    let schedule_kind = flags.schedule.or(file_schedule.kind);
    let tau = flags.tau.or(file_schedule.tau);
    let schedule_given =
        flags.schedule.is_some() || flags.tau.is_some() || file.schedule.is_some();

    if command == Command::Verify {
        return Ok(RunConfig {
            command,
            model: None,
            schedule_kind: None,
            tau: None,
            p: None,
            grid_t1: None,
            grid_t2: None,
            grid_tau: None,
            out,
            format,
            seed,
        });
    }

    // All physical commands need the model block.
    let jx = require(flags.jx.or(file.model.jx), "jx")?;
    let jy = require(flags.jy.or(file.model.jy), "jy")?;
    let h1 = require(flags.h1.or(file.model.h1), "h1")?;
    let h2 = require(flags.h2.or(file.model.h2), "h2")?;
    let t1 = flags.t1.or(file.model.t1);
    let t2 = flags.t2.or(file.model.t2);

    let needs_temperatures = command == Command::Cycle;
    let model = ModelParams::new(
        jx,
        jy,
        h1,
        h2,
        if needs_temperatures {
            require(t1, "t1")?
        } else {
            t1.unwrap_or(1.0)
        },
        if needs_temperatures {
            require(t2, "t2")?
        } else {
            t2.unwrap_or(1.0)
        },
        tau.unwrap_or(1.0),
    )
    .map_err(|e| CliError::config(e.to_string()))?;

    let grid_t1 = flags.grid_t1.or(file.grid_t1);
    let grid_t2 = flags.grid_t2.or(file.grid_t2);
    let grid_tau = flags.grid_tau.or(file.grid_tau);
    for (spec, name) in [
        (&grid_t1, "grid-t1"),
        (&grid_t2, "grid-t2"),
        (&grid_tau, "grid-tau"),
    ] {
        if let Some(spec) = spec {
            spec.validate(name)?;
        }
    }

    let mut config = RunConfig {
        command,
        model: Some(model),
        schedule_kind,
        tau,
        p: p_values,
        grid_t1,
        grid_t2,
        grid_tau,
        out,
        format,
        seed,
    };

    match command {
        Command::Cycle | Command::Sweep => {
            // Exactly one way to fix the stroke: a schedule or an explicit P.
            let p_given = config.p.is_some();
            if p_given && schedule_given {
                return Err(CliError::config(
                    "supply either a schedule (`--schedule`/`--tau`) or `--p`, not both".into(),
                ));
            }
            if !p_given && !schedule_given {
                return Err(CliError::config(
                    "this command needs either a schedule (`--schedule`/`--tau`) or `--p`".into(),
                ));
            }
            if p_given && config.p.as_ref().unwrap().len() != 1 {
                return Err(CliError::config(
                    "this command takes exactly one `p` value".into(),
                ));
            }
            if schedule_given {
                let kind = schedule_kind.unwrap_or(ScheduleKind::SqrtLinear);
                let tau = require(tau, "tau")?;
                if tau <= 0.0 {
                    return Err(CliError::config(format!(
                        "`tau` must be positive, got {tau}"
                    )));
                }
                config.schedule_kind = Some(kind);
                config.tau = Some(tau);
            }
            if command == Command::Sweep {
                config.grid_t1 = Some(grid_t1.unwrap_or(DEFAULT_T_GRID));
                config.grid_t2 = Some(grid_t2.unwrap_or(DEFAULT_T_GRID));
            }
        }
        Command::Adiabaticity => {
            if config.p.is_some() {
                return Err(CliError::config(
                    "`adiabaticity` scans stroke durations; it cannot take `--p`".into(),
                ));
            }
            config.schedule_kind = Some(schedule_kind.unwrap_or(ScheduleKind::SqrtLinear));
            config.grid_tau = Some(grid_tau.unwrap_or(DEFAULT_TAU_GRID));
            config.tau = None;
        }
        Command::Efficiency => {
            if schedule_given {
                return Err(CliError::config(
                    "`efficiency` is parameterized by `--p`; it cannot take a schedule".into(),
                ));
            }
            if config.p.is_none() {
                return Err(CliError::config("`efficiency` needs `--p`".into()));
            }
            // Exactly one temperature axis varies; the other bath is fixed.
            match (grid_t1.is_some(), grid_t2.is_some()) {
                (true, false) => {
                    if t2.is_none() {
                        return Err(CliError::config(
                            "`efficiency` over grid-t1 needs the fixed `--t2`".into(),
                        ));
                    }
                }
                (false, true) => {
                    if t1.is_none() {
                        return Err(CliError::config(
                            "`efficiency` over grid-t2 needs the fixed `--t1`".into(),
                        ));
                    }
                }
                _ => {
                    return Err(CliError::config(
                        "`efficiency` needs exactly one of grid-t1 or grid-t2".into(),
                    ));
                }
            }
        }
        Command::Gap => {
            if schedule_given {
                return Err(CliError::config(
                    "`gap` is parameterized by `--p`; it cannot take a schedule".into(),
                ));
            }
            if config.p.is_none() {
                return Err(CliError::config("`gap` needs `--p`".into()));
            }
            config.grid_t1 = Some(grid_t1.unwrap_or(DEFAULT_T_GRID));
            config.grid_t2 = Some(grid_t2.unwrap_or(DEFAULT_T_GRID));
        }
        Command::Verify => unreachable!("handled above"),
    }

    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags_with(f: impl FnOnce(&mut FlagOverrides)) -> FlagOverrides {
        let mut flags = FlagOverrides::default();
        f(&mut flags);
        flags
    }

    fn fig2_flags(command: &str) -> FlagOverrides {
        flags_with(|f| {
            f.command = Some(command.into());
            f.jx = Some(10.0);
            f.jy = Some(2.0);
            f.h1 = Some(4.0);
            f.h2 = Some(1.0);
        })
    }

    #[test]
    fn grid_spec_parses_all_forms() {
        let g: GridSpec = "0.01:6:201".parse().unwrap();
        assert_eq!(g.count, 201);
        assert_eq!(g.scale, GridScale::Linear);
        let g: GridSpec = "1e-3:50:60:log".parse().unwrap();
        assert_eq!(g.scale, GridScale::Log);
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("1:2:3:cubic".parse::<GridSpec>().is_err());
    }

    #[test]
    fn adiabaticity_config_resolves_with_defaults() {
        let mut flags = fig2_flags("adiabaticity");
        flags.grid_tau = Some("1e-3:50:60:log".parse().unwrap());
        let config = resolve(ConfigFile::default(), flags).unwrap();
        assert_eq!(config.command, Command::Adiabaticity);
        assert_eq!(config.grid_tau.unwrap().count, 60);
        assert_eq!(config.schedule_kind, Some(ScheduleKind::SqrtLinear));
    }

    #[test]
    fn field_ordering_violation_names_the_invariant() {
        let mut flags = fig2_flags("sweep");
        flags.h1 = Some(1.0);
        flags.h2 = Some(4.0);
        flags.p = Some(vec![1.0]);
        let err = resolve(ConfigFile::default(), flags).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("h1"), "message: {message}");
        assert!(message.contains("h1 > h2"), "message: {message}");
    }

    #[test]
    fn sweep_accepts_explicit_p_without_schedule() {
        let mut flags = fig2_flags("sweep");
        flags.p = Some(vec![0.97]);
        let config = resolve(ConfigFile::default(), flags).unwrap();
        assert_eq!(config.p, Some(vec![0.97]));
        assert_eq!(config.grid_t1.unwrap().count, 201);
    }

    #[test]
    fn cycle_rejects_both_schedule_and_p() {
        let mut flags = fig2_flags("cycle");
        flags.t1 = Some(2.0);
        flags.t2 = Some(0.5);
        flags.p = Some(vec![0.97]);
        flags.tau = Some(1.0);
        assert!(resolve(ConfigFile::default(), flags).is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let file: ConfigFile = serde_json::from_str(
            r#"{"command": "sweep", "model": {"jx": 1.0, "jy": 0.5, "h1": 4.0, "h2": 1.0}, "p": 1.0}"#,
        )
        .unwrap();
        let flags = flags_with(|f| f.jx = Some(7.0));
        let config = resolve(file, flags).unwrap();
        assert_eq!(config.model.unwrap().jx, 7.0);
    }

    #[test]
    fn unknown_file_fields_are_rejected() {
        let parsed: Result<ConfigFile, _> =
            serde_json::from_str(r#"{"command": "sweep", "bogus": 1}"#);
        assert!(parsed.is_err());
    }
}
