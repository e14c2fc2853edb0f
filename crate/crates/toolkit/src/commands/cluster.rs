use pension_core::cluster::{
    contingency, cut_dendrogram, distance_matrix, isolated_together, kmeans, rand_index, single_linkage, FeatureMatrix,
    Partition,
};
use pension_core::{Cohort, LeColumn, UfCode};
use serde_json::{json, Value};

use super::outputs;
use crate::cli::{ClusterArgs, CohortChoice, FeatureChoice, MethodChoice};
use crate::error::ToolError;
use crate::input::life_table;
use crate::output::{jnum, num, SCHEMA_VERSION};

pub const SEED_ENV: &str = "PENSION_TOOLKIT_SEED";
pub const DEFAULT_SEED: u64 = 20_180_406;

/// `--seed`, then the environment, then [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, ToolError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| ToolError::Config(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        None => Ok(DEFAULT_SEED),
    }
}

fn labels_rows(ufs: &[UfCode], p: &Partition) -> Vec<Vec<String>> {
    ufs.iter().zip(&p.labels).map(|(u, l)| vec![u.number().to_string(), l.to_string()]).collect()
}

pub fn run(args: &ClusterArgs, config: Value) -> Result<usize, ToolError> {
    let env = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(args.seed, env.as_deref())?;
    let (table, table_file) = life_table(args.table.life_table.as_deref())?;
    let column = match args.features {
        FeatureChoice::Birth => LeColumn::Birth,
        FeatureChoice::After60 => LeColumn::After60,
        FeatureChoice::After65 => LeColumn::After65,
    };
    let cohorts: &[Cohort] = match args.cohort {
        CohortChoice::Total => &[Cohort::Total],
        CohortChoice::Male => &[Cohort::Male],
        CohortChoice::Female => &[Cohort::Female],
        CohortChoice::BySex => &[Cohort::Male, Cohort::Female],
    };
    let mut features = FeatureMatrix::from_table(&table, &[column], cohorts).map_err(ToolError::domain)?;
    if args.standardize {
        features = features.standardize();
    }
    let n = features.len();
    if args.k == 0 || args.k > n {
        return Err(ToolError::Config(format!("--k must lie in 1..={n}, got {}", args.k)));
    }

    let mut out = outputs(&args.common)?;
    let mut partitions: Vec<Partition> = Vec::new();
    let mut method_json = Vec::new();
    if matches!(args.method, MethodChoice::Single | MethodChoice::Both) {
        let dist = distance_matrix(&features.rows).map_err(ToolError::domain)?;
        let dend = single_linkage(&dist);
        let p = cut_dendrogram(&dend, args.k).map_err(ToolError::domain)?;
        let merges: Vec<Vec<String>> = dend
            .merges
            .iter()
            .map(|m| vec![m.a.to_string(), m.b.to_string(), num(m.height), m.size.to_string()])
            .collect();
        out.csv("merges.csv", &["a", "b", "height", "size"], &merges)?;
        out.csv("labels_single.csv", &["uf_num", "label"], &labels_rows(&features.ufs, &p))?;
        method_json.push(json!({
            "method": "single",
            "labels": p.labels,
            "merges": dend.merges.iter().map(|m| json!({ "a": m.a, "b": m.b, "height": jnum(m.height), "size": m.size })).collect::<Vec<_>>(),
        }));
        partitions.push(p);
    }
    if matches!(args.method, MethodChoice::Kmeans | MethodChoice::Both) {
        let res = kmeans(&features.rows, args.k, seed).map_err(ToolError::domain)?;
        out.csv("labels_kmeans.csv", &["uf_num", "label"], &labels_rows(&features.ufs, &res.partition))?;
        method_json.push(json!({
            "method": "kmeans",
            "seed": seed,
            "labels": res.partition.labels,
            "centroids": res.centroids,
            "objective": jnum(res.objective),
            "iterations": res.iterations,
            "converged": res.converged,
        }));
        partitions.push(res.partition);
    }

    let es_sc: Vec<UfCode> = ["ES", "SC"].iter().filter_map(|a| UfCode::from_abbrev(a)).collect();
    let isolation: Vec<Value> = partitions
        .iter()
        .map(|p| json!({ "method": p.method.label(), "es_sc_isolated": isolated_together(p, &features.ufs, &es_sc) }))
        .collect();
    let comparison = match partitions.as_slice() {
        [a, b] => json!({
            "rand_index": jnum(rand_index(a, b).map_err(ToolError::domain)?),
            "contingency": contingency(a, b).map_err(ToolError::domain)?,
        }),
        _ => Value::Null,
    };
    out.json(
        "cluster_report.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "k": args.k,
            "features": features.names,
            "standardized": features.standardized,
            "ufs": features.ufs.iter().map(|u| u.number()).collect::<Vec<_>>(),
            "methods": method_json,
            "isolation": isolation,
            "comparison": comparison,
        }),
    )?;
    let inputs: Vec<_> = table_file.iter().map(|f| (f, table.len())).collect();
    out.manifest("cluster", config, &inputs, json!({ "ufs": n, "k": args.k, "seed": seed }))?;
    Ok(out.written.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(5), Some("9")).unwrap(), 5);
        assert_eq!(resolve_seed(None, Some(" 9 ")).unwrap(), 9);
        assert_eq!(resolve_seed(None, None).unwrap(), DEFAULT_SEED);
        assert_eq!(resolve_seed(None, Some("x")).unwrap_err().exit_code(), 1);
    }
}
