use pension_core::aaf::{aaf_proposal1, aaf_proposal2, AafOptions, Issue, Proposal1Target};
use pension_core::{AafReport, LeBasis};
use serde_json::{json, Value};

use super::{money_config, outputs, sample_window, sex_field, uf_field, Beneficiaries};
use crate::cli::{AafArgs, ProposalChoice, SingleBasis, TargetChoice};
use crate::error::ToolError;
use crate::input::life_table;
use crate::output::{fixed, jnum, money, SCHEMA_VERSION};

pub const COLUMNS: [&str; 14] = [
    "proposal",
    "uf_num",
    "sex",
    "d_eur",
    "w_months",
    "factor",
    "new_age_years",
    "count",
    "per_capita_eur",
    "target_eur",
    "per_capita_after_eur",
    "closed_form_w_months",
    "z_months",
    "basis",
];

fn issue_label(issue: Issue) -> String {
    match issue {
        Issue::EmptyGroup => "empty group".into(),
        Issue::Infeasible => "infeasible".into(),
        Issue::Clamped(n) => format!("{n} lifetime(s) clamped at zero"),
    }
}

pub fn run(args: &AafArgs, config: Value) -> Result<usize, ToolError> {
    let cfg = money_config(&args.common)?;
    let window = sample_window(&args.window)?;
    let (table, table_file) = life_table(args.table.life_table.as_deref())?;
    let data = Beneficiaries::load(&args.beneficiaries, &window)?;
    let elderly = data.elderly();

    let opts = AafOptions {
        basis: match args.le_basis {
            SingleBasis::At65 => LeBasis::At65,
            SingleBasis::Birth => LeBasis::AtBirth,
        },
        target: match args.target {
            TargetChoice::PerSex => Proposal1Target::PerSex,
            TargetChoice::National => Proposal1Target::National,
        },
    };
    let mut reports: Vec<AafReport> = Vec::new();
    if matches!(args.proposal, ProposalChoice::One | ProposalChoice::Both) {
        reports.push(aaf_proposal1(elderly.iter().copied(), &table, &cfg, opts).map_err(ToolError::domain)?);
    }
    if matches!(args.proposal, ProposalChoice::Two | ProposalChoice::Both) {
        reports.push(aaf_proposal2(elderly.iter().copied(), &table, &cfg, opts).map_err(ToolError::domain)?);
    }

    let mut rows = Vec::new();
    let mut json_reports = Vec::new();
    for rep in &reports {
        let p = rep.proposal.number();
        for r in &rep.results {
            rows.push(vec![
                p.to_string(),
                uf_field(Some(r.uf)),
                sex_field(r.sex),
                money(r.d),
                r.w_months.to_string(),
                fixed(r.factor, 6),
                fixed(r.new_age, 4),
                r.count.to_string(),
                money(r.per_capita),
                money(r.target),
                money(r.per_capita_after),
                r.closed_form_w_months.to_string(),
                r.z_months.to_string(),
                opts.basis.label().to_string(),
            ]);
        }
        let results: Vec<Value> = rep
            .results
            .iter()
            .map(|r| {
                json!({
                    "uf_num": r.uf.number(),
                    "sex": r.sex.map(|s| s.code().to_string()),
                    "count": r.count,
                    "per_capita_eur": jnum(r.per_capita),
                    "target_eur": jnum(r.target),
                    "d_eur": jnum(r.d),
                    "w_months": r.w_months,
                    "z_months": r.z_months,
                    "closed_form_w_months": r.closed_form_w_months,
                    "factor": jnum(r.factor),
                    "new_age_years": jnum(r.new_age),
                    "per_capita_after_eur": jnum(r.per_capita_after),
                })
            })
            .collect();
        let diagnostics: Vec<Value> = rep
            .diagnostics
            .iter()
            .map(|d| {
                json!({
                    "uf_num": d.uf.number(),
                    "sex": d.sex.map(|s| s.code().to_string()),
                    "issue": issue_label(d.issue),
                })
            })
            .collect();
        json_reports.push(json!({ "proposal": p, "results": results, "diagnostics": diagnostics }));
    }

    let counts = data.counts();
    let mut out = outputs(&args.common)?;
    out.csv("aaf_report.csv", &COLUMNS, &rows)?;
    out.json(
        "aaf_report.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "basis": opts.basis.label(),
            "counts": counts,
            "proposals": json_reports,
        }),
    )?;
    let mut inputs = vec![(&data.file, data.records.len())];
    if let Some(f) = &table_file {
        inputs.push((f, table.len()));
    }
    out.manifest("aaf", config, &inputs, counts)?;
    Ok(out.written.len())
}
