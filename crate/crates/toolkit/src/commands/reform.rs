use pension_core::aaf::{reform_gap, REFORM_AGE_YEARS};
use serde_json::{json, Value};

use super::outputs;
use crate::cli::ReformArgs;
use crate::error::ToolError;
use crate::input::life_table;
use crate::output::{fixed, SCHEMA_VERSION};

pub fn run(args: &ReformArgs, config: Value) -> Result<usize, ToolError> {
    let (table, table_file) = life_table(args.table.life_table.as_deref())?;
    let gaps = reform_gap(&table);
    let rows: Vec<Vec<String>> = gaps
        .iter()
        .map(|g| vec![g.uf.number().to_string(), g.uf.abbrev().to_string(), fixed(g.gap_years(), 2)])
        .collect();

    let min = gaps.iter().min_by_key(|g| (g.gap.0, g.uf));
    let max = gaps.iter().max_by_key(|g| (g.gap.0, std::cmp::Reverse(g.uf)));
    let extreme = |g: Option<&pension_core::ReformGap>| {
        g.map(|g| json!({ "uf_num": g.uf.number(), "abbrev": g.uf.abbrev(), "gap_years": g.gap_years() }))
    };
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "reform_age_years": REFORM_AGE_YEARS,
        "min": extreme(min),
        "max": extreme(max),
        "gaps": gaps
            .iter()
            .map(|g| json!({ "uf_num": g.uf.number(), "abbrev": g.uf.abbrev(), "gap_years": g.gap_years() }))
            .collect::<Vec<_>>(),
    });

    let mut out = outputs(&args.common)?;
    out.csv("reform.csv", &["uf_num", "abbrev", "gap_years"], &rows)?;
    out.json("reform.json", &report)?;
    let inputs: Vec<_> = table_file.iter().map(|f| (f, table.len())).collect();
    out.manifest("reform", config, &inputs, json!({ "ufs": gaps.len() }))?;
    Ok(out.written.len())
}
