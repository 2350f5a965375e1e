//! Result emission: CSV with commented metadata lines or JSON with a
//! metadata header. Identical configurations produce byte-identical files;
//! floating-point columns carry 12 significant digits, enough to round-trip
//! doubles.

use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Scientific notation with 12 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn fmt_opt_float(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn escape_csv(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A result row that knows its CSV form; JSON comes from `Serialize`.
pub trait Record: Serialize {
    fn csv_header() -> &'static [&'static str];
    fn csv_row(&self) -> Vec<String>;
}

pub fn render<R: Record>(config: &RunConfig, records: &[R]) -> Result<String, CliError> {
    match config.format {
        OutputFormat::Csv => render_csv(config, records),
        OutputFormat::Json => render_json(config, records),
    }
}

fn config_json(config: &RunConfig) -> Result<String, CliError> {
    serde_json::to_string(config).map_err(|e| CliError::Io(format!("config serialization: {e}")))
}

fn render_csv<R: Record>(config: &RunConfig, records: &[R]) -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str(&format!("# config = {}\n", config_json(config)?));
    out.push_str(&format!("# version = {TOOL_VERSION}\n"));
    out.push_str(&R::csv_header().join(","));
    out.push('\n');
    for record in records {
        let row: Vec<String> = record.csv_row().iter().map(|c| escape_csv(c)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn render_json<R: Record>(config: &RunConfig, records: &[R]) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Metadata<'a> {
        config: &'a RunConfig,
        version: &'static str,
    }
    #[derive(Serialize)]
    struct Envelope<'a, R: Serialize> {
        metadata: Metadata<'a>,
        records: &'a [R],
    }
    let envelope = Envelope {
        metadata: Metadata {
            config,
            version: TOOL_VERSION,
        },
        records,
    };
    let mut text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::Io(format!("result serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Write to the configured path, or stdout when none is given.
pub fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
