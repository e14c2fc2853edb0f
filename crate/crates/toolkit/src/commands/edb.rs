use pension_core::edb::{currency_convert, edb_aggregate, EdbRow};
use pension_core::{LeBasis, MoneyConfig};
use serde_json::{json, Value};

use super::{money_config, outputs, sample_window, sex_field, uf_field, Beneficiaries};
use crate::cli::{BasisChoice, EdbArgs};
use crate::error::ToolError;
use crate::input::life_table;
use crate::output::{fixed, jnum, money, SCHEMA_VERSION};

pub const COLUMNS: [&str; 10] = [
    "group_kind",
    "uf_num",
    "sex",
    "count",
    "total_edb_eur",
    "per_capita_eur",
    "share_pct",
    "cum_share_pct",
    "total_edb_brl",
    "basis",
];

fn csv_row(row: &EdbRow, basis: LeBasis, cfg: &MoneyConfig) -> Vec<String> {
    vec![
        row.kind.label().to_string(),
        uf_field(row.uf),
        sex_field(row.sex),
        row.count.to_string(),
        money(row.total),
        money(row.per_capita),
        fixed(row.share_pct, 4),
        fixed(row.cum_share_pct, 4),
        money(currency_convert(row.total, cfg)),
        basis.label().to_string(),
    ]
}

fn json_row(row: &EdbRow, cfg: &MoneyConfig) -> Value {
    json!({
        "group_kind": row.kind.label(),
        "uf_num": row.uf.map(|u| u.number()),
        "sex": row.sex.map(|s| s.code().to_string()),
        "count": row.count,
        "total_edb_eur": jnum(row.total),
        "per_capita_eur": jnum(row.per_capita),
        "share_pct": jnum(row.share_pct),
        "cum_share_pct": jnum(row.cum_share_pct),
        "total_edb_brl": jnum(currency_convert(row.total, cfg)),
    })
}

pub fn run(args: &EdbArgs, config: Value) -> Result<usize, ToolError> {
    let cfg = money_config(&args.common)?;
    let window = sample_window(&args.window)?;
    let (table, table_file) = life_table(args.table.life_table.as_deref())?;
    let data = Beneficiaries::load(&args.beneficiaries, &window)?;
    let elderly = data.elderly();

    let bases: &[LeBasis] = match args.le_basis {
        BasisChoice::At65 => &[LeBasis::At65],
        BasisChoice::Birth => &[LeBasis::AtBirth],
        BasisChoice::Both => &[LeBasis::AtBirth, LeBasis::At65],
    };
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &basis in bases {
        let report = edb_aggregate(elderly.iter().copied(), &table, &cfg, basis).map_err(ToolError::domain)?;
        rows.extend(report.rows.iter().map(|r| csv_row(r, basis, &cfg)));
        reports.push(json!({
            "basis": basis.label(),
            "rows": report.rows.iter().map(|r| json_row(r, &cfg)).collect::<Vec<_>>(),
        }));
    }

    let counts = data.counts();
    let mut out = outputs(&args.common)?;
    out.csv("edb_report.csv", &COLUMNS, &rows)?;
    out.json(
        "edb_report.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "currency": "EUR",
            "exchange_rate": cfg.exchange_rate,
            "reference_date": cfg.reference_date.to_string(),
            "counts": counts,
            "reports": reports,
        }),
    )?;
    let mut inputs = vec![(&data.file, data.records.len())];
    if let Some(f) = &table_file {
        inputs.push((f, table.len()));
    }
    out.manifest("edb", config, &inputs, counts)?;
    Ok(out.written.len())
}
