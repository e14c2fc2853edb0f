//! CSV ingestion with per-row diagnostics.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use pension_core::{BeneficiaryRecord, BenefitKind, EconomicRow, LifeTable, Sex, UfCode};
use sha2::{Digest, Sha256};

use crate::error::ToolError;

pub const BENEFICIARY_COLUMNS: [&str; 7] = ["id", "uf_num", "sex", "birth_date", "grant_date", "kind", "survivor"];
pub const ECONOMIC_COLUMNS: [&str; 9] =
    ["uf_num", "hdi", "income_pc", "le_birth", "density", "population", "bnf_total", "bnf_elderly", "bnf_disabled"];

const MAX_REPORTED: usize = 20;

/// Raw bytes of an input file plus its checksum.
pub struct InputFile {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
    pub sha256: String,
}

impl InputFile {
    pub fn read(path: &Path) -> Result<Self, ToolError> {
        let bytes = std::fs::read(path).map_err(|source| ToolError::Read { path: path.to_path_buf(), source })?;
        let sha256 = hex(&Sha256::digest(&bytes));
        Ok(Self { path: path.to_path_buf(), bytes, sha256 })
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

struct Errors {
    path: PathBuf,
    lines: Vec<String>,
}

impl Errors {
    fn new(path: &Path) -> Self {
        Self { path: path.to_path_buf(), lines: Vec::new() }
    }

    fn push(&mut self, line: u64, msg: impl std::fmt::Display) {
        self.lines.push(format!("line {line}: {msg}"));
    }

    fn finish(self) -> Result<(), ToolError> {
        if self.lines.is_empty() {
            return Ok(());
        }
        let count = self.lines.len();
        let mut details: Vec<String> = self.lines.into_iter().take(MAX_REPORTED).collect();
        if count > MAX_REPORTED {
            details.push(format!("... {} more", count - MAX_REPORTED));
        }
        Err(ToolError::Schema { path: self.path, count, details: details.join("\n") })
    }
}

/// Rows of a headed CSV with the exact column set, each tagged with its line.
fn rows(file: &InputFile, columns: &[&str]) -> Result<Vec<(u64, Vec<String>)>, ToolError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file.bytes.as_slice());
    let mut errs = Errors::new(&file.path);
    let header = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => {
            errs.push(1, e);
            return errs.finish().map(|_| Vec::new());
        }
    };
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != columns {
        errs.push(1, format!("expected header `{}`, found `{}`", columns.join(","), names.join(",")));
        return errs.finish().map(|_| Vec::new());
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        match rec {
            Ok(r) => {
                let line = r.position().map_or(0, |p| p.line());
                if r.len() != columns.len() {
                    errs.push(line, format!("expected {} fields, found {}", columns.len(), r.len()));
                    continue;
                }
                out.push((line, r.iter().map(|f| f.trim().to_string()).collect()));
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errs.push(line, e);
            }
        }
    }
    errs.finish()?;
    Ok(out)
}

fn uf(s: &str) -> Result<UfCode, String> {
    s.parse::<u8>().ok().and_then(UfCode::new).ok_or_else(|| format!("uf_num `{s}` is not in 1..27"))
}

fn date(field: &str, s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("{field} `{s}` is not YYYY-MM-DD"))
}

fn finite(field: &str, s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{field} `{s}` is not a finite number")),
    }
}

fn count(field: &str, s: &str) -> Result<u64, String> {
    s.parse::<u64>().map_err(|_| format!("{field} `{s}` is not a non-negative integer"))
}

pub fn parse_beneficiaries(file: &InputFile) -> Result<Vec<BeneficiaryRecord>, ToolError> {
    let mut errs = Errors::new(&file.path);
    let mut out = Vec::new();
    for (line, f) in rows(file, &BENEFICIARY_COLUMNS)? {
        let parsed = (|| -> Result<BeneficiaryRecord, String> {
            if f[0].is_empty() {
                return Err("empty id".into());
            }
            Ok(BeneficiaryRecord {
                id: f[0].clone(),
                uf: uf(&f[1])?,
                sex: match f[2].as_str() {
                    "M" => Sex::Male,
                    "F" => Sex::Female,
                    s => return Err(format!("sex `{s}` is not M or F")),
                },
                birth_date: date("birth_date", &f[3])?,
                grant_date: date("grant_date", &f[4])?,
                kind: match f[5].as_str() {
                    "E" => BenefitKind::Elderly,
                    "D" => BenefitKind::Disabled,
                    s => return Err(format!("kind `{s}` is not E or D")),
                },
                survivor: match f[6].as_str() {
                    "0" => false,
                    "1" => true,
                    s => return Err(format!("survivor `{s}` is not 0 or 1")),
                },
            })
        })();
        match parsed {
            Ok(r) => out.push(r),
            Err(msg) => errs.push(line, msg),
        }
    }
    errs.finish()?;
    Ok(out)
}

pub fn parse_economics(file: &InputFile) -> Result<Vec<EconomicRow>, ToolError> {
    let mut errs = Errors::new(&file.path);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (line, f) in rows(file, &ECONOMIC_COLUMNS)? {
        let parsed = (|| -> Result<EconomicRow, String> {
            let row = EconomicRow {
                uf: uf(&f[0])?,
                hdi: finite("hdi", &f[1])?,
                income_pc: finite("income_pc", &f[2])?,
                le_birth: finite("le_birth", &f[3])?,
                density: finite("density", &f[4])?,
                population: count("population", &f[5])?,
                bnf_total: count("bnf_total", &f[6])?,
                bnf_elderly: count("bnf_elderly", &f[7])?,
                bnf_disabled: count("bnf_disabled", &f[8])?,
            };
            if row.population == 0 {
                return Err("population must be positive".into());
            }
            if !seen.insert(row.uf) {
                return Err(format!("duplicate uf_num {}", row.uf.number()));
            }
            Ok(row)
        })();
        match parsed {
            Ok(r) => out.push(r),
            Err(msg) => errs.push(line, msg),
        }
    }
    errs.finish()?;
    Ok(out)
}

/// Bundled table, or a replacement file with the same layout.
pub fn life_table(path: Option<&Path>) -> Result<(LifeTable, Option<InputFile>), ToolError> {
    match path {
        None => {
            let (table, _) = pension_core::reference::load_reference_tables().map_err(ToolError::domain)?;
            Ok((table, None))
        }
        Some(p) => {
            let file = InputFile::read(p)?;
            let text = std::str::from_utf8(&file.bytes)
                .map_err(|e| ToolError::Domain(format!("{}: not UTF-8: {e}", p.display())))?;
            let table = LifeTable::parse(text).map_err(|e| ToolError::Domain(format!("{}: {e}", p.display())))?;
            Ok((table, Some(file)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> InputFile {
        InputFile { path: "mem.csv".into(), bytes: text.as_bytes().to_vec(), sha256: String::new() }
    }

    #[test]
    fn beneficiaries_round_trip() {
        let f = file("id,uf_num,sex,birth_date,grant_date,kind,survivor\nA1,19,M,1950-01-31,2018-02-01,E,0\n");
        let recs = parse_beneficiaries(&f).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].uf.abbrev(), "SC");
        assert!(parse_beneficiaries(&file("id,uf_num,sex,birth_date,grant_date,kind,survivor\n")).unwrap().is_empty());
    }

    #[test]
    fn schema_errors_carry_lines() {
        let f = file("id,uf_num,sex,birth_date,grant_date,kind,survivor\nA1,28,M,1950-01-31,2018-02-01,E,0\nA2,1,X,1950-01-31,2018-02-01,E,0\n");
        let err = parse_beneficiaries(&f).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2: uf_num `28`") && msg.contains("line 3: sex `X`"), "{msg}");
        assert_eq!(err.exit_code(), 2);
        assert!(parse_beneficiaries(&file("id,uf,sex\n")).is_err());
    }

    #[test]
    fn economics_checks() {
        let head = ECONOMIC_COLUMNS.join(",");
        let ok = file(&format!("{head}\n1,0.6,900,70.7,100,1000,10,4,6\n"));
        assert_eq!(parse_economics(&ok).unwrap()[0].bnf_total, 10);
        let bad = file(&format!("{head}\n1,0.6,900,70.7,100,0,10,4,6\n2,0.6,nan,70.7,100,5,1,1,0\n"));
        let msg = parse_economics(&bad).unwrap_err().to_string();
        assert!(msg.contains("population must be positive") && msg.contains("income_pc"));
    }
}
