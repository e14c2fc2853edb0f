//! One module per subcommand. Each reads its inputs, calls into
//! `pension_core` and hands rows to [`Outputs`].

mod aaf;
mod cluster;
mod edb;
mod reform;
mod regress;
mod validate;

use std::path::Path;

use pension_core::{validate_records, BeneficiaryRecord, MoneyConfig, SampleWindow, Sex, UfCode, ValidationReport};
use serde_json::{json, Value};

use crate::cli::{Command, Common, WindowArgs};
use crate::error::ToolError;
use crate::input::{parse_beneficiaries, InputFile};
use crate::output::Outputs;

pub use cluster::{resolve_seed, DEFAULT_SEED, SEED_ENV};

pub fn execute(cmd: &Command) -> Result<String, ToolError> {
    let config = serde_json::to_value(cmd).expect("arguments serialize");
    let (common, done) = match cmd {
        Command::Validate(a) => (&a.common, validate::run(a, config)?),
        Command::Edb(a) => (&a.common, edb::run(a, config)?),
        Command::Aaf(a) => (&a.common, aaf::run(a, config)?),
        Command::Reform(a) => (&a.common, reform::run(a, config)?),
        Command::Regress(a) => (&a.common, regress::run(a, config)?),
        Command::Cluster(a) => (&a.common, cluster::run(a, config)?),
    };
    Ok(format!("{}: wrote {} file(s) to {}", cmd.name(), done, common.out.display()))
}

pub(crate) fn money_config(c: &Common) -> Result<MoneyConfig, ToolError> {
    let cfg =
        MoneyConfig { benefit: c.benefit, annual_rate: c.rate, exchange_rate: c.fx, reference_date: c.reference_date };
    cfg.check().map_err(|e| ToolError::Config(e.to_string()))?;
    Ok(cfg)
}

pub(crate) fn sample_window(w: &WindowArgs) -> Result<SampleWindow, ToolError> {
    if w.window_start > w.window_end {
        return Err(ToolError::Config(format!("window start {} is after window end {}", w.window_start, w.window_end)));
    }
    Ok(SampleWindow { start: w.window_start, end: w.window_end })
}

pub(crate) struct Beneficiaries {
    pub file: InputFile,
    pub records: Vec<BeneficiaryRecord>,
    pub report: ValidationReport,
}

impl Beneficiaries {
    pub fn load(path: &Path, window: &SampleWindow) -> Result<Self, ToolError> {
        let file = InputFile::read(path)?;
        let records = parse_beneficiaries(&file)?;
        let report = validate_records(&records, window);
        Ok(Self { file, records, report })
    }

    pub fn elderly(&self) -> Vec<&BeneficiaryRecord> {
        self.report.elderly_analysis_set(&self.records)
    }

    pub fn counts(&self) -> Value {
        let r = &self.report;
        json!({
            "records": r.total,
            "accepted": r.accepted.len(),
            "rejected": r.rejected.len(),
            "excluded_survivors": r.excluded_survivors.len(),
            "analysis": r.analysis.len(),
            "analysis_elderly": r.analysis_by_kind.elderly,
            "analysis_disabled": r.analysis_by_kind.disabled,
        })
    }
}

pub(crate) fn outputs(c: &Common) -> Result<Outputs, ToolError> {
    Outputs::new(&c.out, c.format)
}

pub(crate) fn uf_field(uf: Option<UfCode>) -> String {
    uf.map_or_else(String::new, |u| u.number().to_string())
}

pub(crate) fn sex_field(sex: Option<Sex>) -> String {
    sex.map_or_else(String::new, |s| s.code().to_string())
}
