use serde_json::{json, Value};

use super::{outputs, sample_window, Beneficiaries};
use crate::cli::ValidateArgs;
use crate::error::ToolError;
use crate::output::SCHEMA_VERSION;

pub fn run(args: &ValidateArgs, config: Value) -> Result<usize, ToolError> {
    let window = sample_window(&args.window)?;
    let data = Beneficiaries::load(&args.beneficiaries, &window)?;
    let r = &data.report;

    let mut status = vec![("accepted", String::new()); data.records.len()];
    for rej in &r.rejected {
        status[rej.index] = ("rejected", rej.reason.to_string());
    }
    for &i in &r.excluded_survivors {
        status[i] = ("survivor", String::new());
    }
    let rows: Vec<Vec<String>> = data
        .records
        .iter()
        .zip(&status)
        .enumerate()
        .map(|(i, (rec, (s, reason)))| vec![i.to_string(), rec.id.clone(), (*s).to_string(), reason.clone()])
        .collect();

    let rejected: Vec<Value> =
        r.rejected.iter().map(|x| json!({ "index": x.index, "id": x.id, "reason": x.reason.to_string() })).collect();
    let survivors: Vec<&str> = r.excluded_survivors.iter().map(|&i| data.records[i].id.as_str()).collect();
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "window": { "start": window.start.to_string(), "end": window.end.to_string() },
        "counts": data.counts(),
        "accepted_by_kind": { "elderly": r.accepted_by_kind.elderly, "disabled": r.accepted_by_kind.disabled },
        "rejected": rejected,
        "excluded_survivors": survivors,
    });

    let mut out = outputs(&args.common)?;
    out.csv("validation.csv", &["index", "id", "status", "reason"], &rows)?;
    out.json("validation.json", &report)?;
    out.manifest("validate", config, &[(&data.file, data.records.len())], data.counts())?;
    Ok(out.written.len())
}
