//! Report files, number formatting and the run manifest.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rust_decimal::{Decimal, RoundingStrategy};
use serde_json::{json, Value};

use crate::cli::Format;
use crate::error::ToolError;
use crate::input::InputFile;

pub const SCHEMA_VERSION: &str = "1";

/// Currency to two decimals, half away from zero, applied to the shortest
/// decimal representation of the value.
pub fn money(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    match Decimal::from_str(&format!("{x}")) {
        Ok(d) => {
            let r = d.round_dp_with_strategy(2, RoundingStrategy::MidpointAwayFromZero);
            let s = format!("{r:.2}");
            if s == "-0.00" {
                "0.00".into()
            } else {
                s
            }
        }
        Err(_) => format!("{x:.2}"),
    }
}

/// Fixed decimals; empty for non-finite values.
pub fn fixed(x: f64, dp: usize) -> String {
    if x.is_finite() {
        let s = format!("{x:.dp$}");
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    } else {
        String::new()
    }
}

/// Shortest round-trip representation; `inf`/`-inf` kept, NaN empty.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

/// JSON number, or null when not finite.
pub fn jnum(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub struct Outputs {
    dir: PathBuf,
    format: Option<Format>,
    pub written: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path, format: Option<Format>) -> Result<Self, ToolError> {
        std::fs::create_dir_all(dir).map_err(|source| ToolError::Write { path: dir.to_path_buf(), source })?;
        Ok(Self { dir: dir.to_path_buf(), format, written: Vec::new() })
    }

    fn wants(&self, f: Format) -> bool {
        self.format.is_none_or(|g| g == f)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), ToolError> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        self.force_csv(name, header, rows)
    }

    /// Writes a CSV regardless of `--format` (auxiliary point sets).
    pub fn force_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), ToolError> {
        let path = self.dir.join(name);
        let err = |e: csv::Error| ToolError::Write { path: path.clone(), source: std::io::Error::other(e) };
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        w.flush().map_err(|source| ToolError::Write { path: path.clone(), source })?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), ToolError> {
        if !self.wants(Format::Json) {
            return Ok(());
        }
        self.write_json(name, value)
    }

    fn write_json(&mut self, name: &str, value: &Value) -> Result<(), ToolError> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
        text.push('\n');
        std::fs::write(&path, text).map_err(|source| ToolError::Write { path, source })?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// `manifest.json`, always written.
    pub fn manifest(
        &mut self,
        subcommand: &str,
        config: Value,
        inputs: &[(&InputFile, usize)],
        counts: Value,
    ) -> Result<(), ToolError> {
        let inputs: Vec<Value> = inputs
            .iter()
            .map(|(f, rows)| json!({ "path": f.path.display().to_string(), "sha256": f.sha256, "rows": rows }))
            .collect();
        let mut files = self.written.clone();
        files.sort();
        let m = json!({
            "schema_version": SCHEMA_VERSION,
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": subcommand,
            "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            "config": config,
            "inputs": inputs,
            "counts": counts,
            "outputs": files,
        });
        self.write_json("manifest.json", &m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn money_half_up() {
        assert_eq!(money(1.005), "1.01");
        assert_eq!(money(2.675), "2.68");
        assert_eq!(money(-1.005), "-1.01");
        assert_eq!(money(714_044_109.82 * 4.35), "3106091877.72");
        assert_eq!(money(-0.001), "0.00");
        assert_eq!(money(0.0), "0.00");
        assert_eq!(money(f64::NAN), "");
    }

    #[test]
    fn number_formats() {
        assert_eq!(fixed(-0.0000001, 4), "0.0000");
        assert_eq!(fixed(64.0, 2), "64.00");
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(opt_num(None), "");
        assert_eq!(jnum(f64::NAN), Value::Null);
    }
}
