use pension_core::stats::{
    influence, plot_data, select_model, DesignSpec, DiagnosticOptions, FittedModel, Lambda, Regressor, Response,
    Selection, SelectionEntry, Status, TestResult, Transform, Vertex,
};
use pension_core::EconomicRow;
use serde_json::{json, Value};

use super::outputs;
use crate::cli::{RegressArgs, ResponseChoice};
use crate::error::ToolError;
use crate::input::{parse_economics, InputFile};
use crate::output::{jnum, num, opt_num, Outputs, SCHEMA_VERSION};

const TESTS: [&str; 4] = ["jarque_bera", "reset", "rainbow", "koenker"];

fn parse_regressors(names: &[String]) -> Result<Vec<Regressor>, ToolError> {
    let mut out = Vec::new();
    for n in names {
        let r = Regressor::ALL
            .into_iter()
            .find(|r| r.symbol().eq_ignore_ascii_case(n.trim()))
            .ok_or_else(|| ToolError::Config(format!("unknown regressor `{n}`; expected X1, X2, X3 or X4")))?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    if out.is_empty() {
        return Err(ToolError::Config("at least one regressor is required".into()));
    }
    out.sort_by_key(|r| r.symbol());
    Ok(out)
}

fn parse_lambda(s: &str) -> Result<Lambda, ToolError> {
    if s.eq_ignore_ascii_case("estimate") {
        return Ok(Lambda::Estimate);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Lambda::Fixed(v)),
        _ => Err(ToolError::Config(format!("--lambda expects `estimate` or a finite number, got `{s}`"))),
    }
}

/// Linear, quadratic, and quadratic with each response transform.
pub fn candidates(response: Response, regressors: &[Regressor], lambda: Lambda) -> Vec<DesignSpec> {
    let quad = DesignSpec::quadratic(response, regressors);
    vec![
        DesignSpec::linear(response, regressors),
        quad.clone(),
        quad.clone().with_transform(Transform::BoxCox(lambda)),
        quad.with_transform(Transform::YeoJohnson(lambda)),
    ]
}

fn status_label(s: &Status) -> String {
    match s {
        Status::Survivor => "survivor".into(),
        Status::ResetRejected => "reset rejected".into(),
        Status::ResetFailed(e) => format!("reset failed: {e}"),
        Status::FitFailed(e) => format!("fit failed: {e}"),
    }
}

fn test_fields(t: &Result<TestResult, pension_core::stats::StatsError>) -> [String; 2] {
    match t {
        Ok(t) => [num(t.statistic), num(t.p_value)],
        Err(_) => [String::new(), String::new()],
    }
}

fn test_json(t: &Result<TestResult, pension_core::stats::StatsError>) -> Value {
    match t {
        Ok(t) => json!({
            "statistic": jnum(t.statistic),
            "df1": jnum(t.df1),
            "df2": t.df2.map(jnum),
            "p_value": jnum(t.p_value),
            "reject": t.reject,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

#[derive(Default)]
struct Tables {
    models: Vec<Vec<String>>,
    coefficients: Vec<Vec<String>>,
    turning: Vec<Vec<String>>,
    influence: Vec<Vec<String>>,
    vif: Vec<Vec<String>>,
}

fn model_json(e: &SelectionEntry) -> Value {
    let mut v = json!({
        "approach": e.spec.approach(),
        "status": status_label(&e.status),
        "aic_rank": e.aic_rank,
        "bic_rank": e.bic_rank,
    });
    if let Some(m) = &e.model {
        v["nobs"] = json!(m.nobs());
        v["lambda"] = json!(m.lambda.map(jnum));
        v["lambda_estimated"] = json!(m.lambda_estimated);
        v["r2"] = jnum(m.r2);
        v["adj_r2"] = jnum(m.adj_r2);
        v["f_statistic"] = jnum(m.f_statistic);
        v["f_p_value"] = jnum(m.f_p_value);
        v["log_likelihood"] = jnum(m.log_likelihood);
        v["n_params"] = json!(m.n_params);
        v["aic"] = jnum(m.aic);
        v["bic"] = jnum(m.bic);
        v["coefficients"] = m
            .coefficients
            .iter()
            .map(|c| {
                json!({
                    "term": c.name,
                    "estimate": jnum(c.estimate),
                    "std_error": jnum(c.std_error),
                    "t_value": jnum(c.t_value),
                    "p_value": jnum(c.p_value),
                })
            })
            .collect();
        v["turning_points"] = m
            .turning_points()
            .iter()
            .map(|t| json!({ "regressor": t.regressor.symbol(), "vertex": t.vertex().map(jnum), "inside_range": t.inside_range }))
            .collect();
    }
    if let Some(b) = &e.battery {
        v["tests"] = json!({
            "jarque_bera": test_json(&b.jarque_bera),
            "reset": test_json(&b.reset),
            "rainbow": test_json(&b.rainbow),
            "koenker": test_json(&b.koenker),
        });
        v["vif"] = match &b.vif {
            Ok(vs) => vs
                .iter()
                .map(|x| json!({ "term": x.name, "vif": jnum(x.value), "infinite": x.is_infinite() }))
                .collect(),
            Err(err) => json!({ "error": err.to_string() }),
        };
    }
    v
}

fn tabulate(t: &mut Tables, response: Response, e: &SelectionEntry) {
    let resp = response.label().to_string();
    let approach = e.spec.approach().to_string();
    let key = || vec![resp.clone(), approach.clone()];
    let mut row = key();
    match &e.model {
        Some(m) => row.extend([
            m.nobs().to_string(),
            m.k().to_string(),
            opt_num(m.lambda),
            num(m.r2),
            num(m.adj_r2),
            num(m.f_statistic),
            num(m.f_p_value),
            num(m.log_likelihood),
            m.n_params.to_string(),
            num(m.aic),
            num(m.bic),
        ]),
        None => row.extend(std::iter::repeat_n(String::new(), 11)),
    }
    match &e.battery {
        Some(b) => {
            for test in [&b.jarque_bera, &b.reset, &b.rainbow, &b.koenker] {
                row.extend(test_fields(test));
            }
        }
        None => row.extend(std::iter::repeat_n(String::new(), 2 * TESTS.len())),
    }
    row.push(status_label(&e.status));
    row.push(e.aic_rank.map_or_else(String::new, |r| r.to_string()));
    row.push(e.bic_rank.map_or_else(String::new, |r| r.to_string()));
    t.models.push(row);

    let Some(m) = &e.model else { return };
    for c in &m.coefficients {
        let mut r = key();
        r.extend([c.name.clone(), num(c.estimate), num(c.std_error), num(c.t_value), num(c.p_value)]);
        t.coefficients.push(r);
    }
    for tp in m.turning_points() {
        let mut r = key();
        let (vertex, note) = match tp.vertex {
            Vertex::At(v) => (num(v), String::new()),
            Vertex::NoLinearTerm => (String::new(), "no linear term".into()),
            Vertex::ZeroCurvature => (String::new(), "zero curvature".into()),
        };
        r.extend([
            tp.regressor.symbol().to_string(),
            vertex,
            tp.inside_range.map_or_else(String::new, |b| b.to_string()),
            note,
        ]);
        t.turning.push(r);
    }
    let inf = influence(m);
    for i in 0..m.nobs() {
        let mut r = key();
        r.extend([
            m.ufs.get(i).map_or_else(String::new, |u| u.number().to_string()),
            num(inf.leverage[i]),
            opt_num(inf.studentized[i]),
            opt_num(inf.cooks_distance[i]),
            inf.high_leverage[i].to_string(),
            inf.outlier[i].to_string(),
            inf.influential[i].to_string(),
        ]);
        t.influence.push(r);
    }
    if let Some(Ok(vs)) = e.battery.as_ref().map(|b| &b.vif) {
        for v in vs {
            let mut r = key();
            r.extend([v.name.clone(), num(v.value)]);
            t.vif.push(r);
        }
    }
}

fn plot_rows(m: &FittedModel) -> Vec<Vec<String>> {
    let p = plot_data(m);
    let panels = [
        ("residual_fitted", &p.residual_fitted),
        ("qq", &p.qq),
        ("scale_location", &p.scale_location),
        ("residual_leverage", &p.residual_leverage),
    ];
    panels
        .iter()
        .flat_map(|(name, pts)| pts.iter().map(move |&(x, y)| vec![(*name).to_string(), num(x), num(y)]))
        .collect()
}

pub fn analyse(
    rows: &[EconomicRow],
    responses: &[Response],
    regressors: &[Regressor],
    lambda: Lambda,
    opts: &DiagnosticOptions,
) -> Result<Vec<(Response, Selection)>, ToolError> {
    responses
        .iter()
        .map(|&resp| {
            select_model(&candidates(resp, regressors, lambda), rows, opts)
                .map(|s| (resp, s))
                .map_err(ToolError::domain)
        })
        .collect()
}

pub fn run(args: &RegressArgs, config: Value) -> Result<usize, ToolError> {
    let regressors = parse_regressors(&args.regressors)?;
    let lambda = parse_lambda(&args.lambda)?;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(ToolError::Config(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    if !(args.rainbow_fraction > 0.0 && args.rainbow_fraction < 1.0) {
        return Err(ToolError::Config(format!("--rainbow-fraction must lie in (0, 1), got {}", args.rainbow_fraction)));
    }
    if args.reset_powers.is_empty() || args.reset_powers.iter().any(|&p| p < 2) {
        return Err(ToolError::Config("--reset-powers must be integers of at least 2".into()));
    }
    let opts = DiagnosticOptions {
        alpha: args.alpha,
        reset_powers: args.reset_powers.clone(),
        rainbow_fraction: args.rainbow_fraction,
    };
    let responses: Vec<Response> = match args.response {
        ResponseChoice::Total => vec![Response::Total],
        ResponseChoice::Elderly => vec![Response::Elderly],
        ResponseChoice::Disabled => vec![Response::Disabled],
        ResponseChoice::All => Response::ALL.to_vec(),
    };

    let file = InputFile::read(&args.economics)?;
    let rows = parse_economics(&file)?;
    let selections = analyse(&rows, &responses, &regressors, lambda, &opts)?;

    let mut tables = Tables::default();
    let mut reports = Vec::new();
    let mut out: Outputs = outputs(&args.common)?;
    for (resp, sel) in &selections {
        for e in &sel.entries {
            tabulate(&mut tables, *resp, e);
        }
        reports.push(json!({
            "response": resp.label(),
            "best_by_aic": sel.best_by_aic().map(|e| e.spec.approach()),
            "best_by_bic": sel.best_by_bic().map(|e| e.spec.approach()),
            "models": sel.entries.iter().map(model_json).collect::<Vec<_>>(),
        }));
        if args.emit_plot_data {
            if let Some(m) = sel.best_by_aic().and_then(|e| e.model.as_ref()) {
                out.force_csv(&format!("plot_{}.csv", resp.label()), &["panel", "x", "y"], &plot_rows(m))?;
            }
        }
    }

    let mut model_cols = vec![
        "response",
        "approach",
        "nobs",
        "k",
        "lambda",
        "r2",
        "adj_r2",
        "f_statistic",
        "f_p_value",
        "log_likelihood",
        "n_params",
        "aic",
        "bic",
    ];
    let test_cols: Vec<String> = TESTS.iter().flat_map(|t| [format!("{t}_stat"), format!("{t}_p")]).collect();
    model_cols.extend(test_cols.iter().map(String::as_str));
    model_cols.extend(["status", "aic_rank", "bic_rank"]);

    out.csv("regress_models.csv", &model_cols, &tables.models)?;
    out.csv(
        "regress_coefficients.csv",
        &["response", "approach", "term", "estimate", "std_error", "t_value", "p_value"],
        &tables.coefficients,
    )?;
    out.csv(
        "regress_turning_points.csv",
        &["response", "approach", "regressor", "vertex", "inside_range", "note"],
        &tables.turning,
    )?;
    out.csv(
        "regress_influence.csv",
        &[
            "response",
            "approach",
            "uf_num",
            "leverage",
            "studentized",
            "cooks_distance",
            "high_leverage",
            "outlier",
            "influential",
        ],
        &tables.influence,
    )?;
    out.csv("regress_vif.csv", &["response", "approach", "term", "vif"], &tables.vif)?;
    out.json(
        "regress_report.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "alpha": opts.alpha,
            "ratio_per_inhabitants": pension_core::stats::ols::RATIO_SCALE,
            "regressors": regressors.iter().map(|r| r.symbol()).collect::<Vec<_>>(),
            "responses": reports,
        }),
    )?;
    out.manifest("regress", config, &[(&file, rows.len())], json!({ "observations": rows.len() }))?;
    Ok(out.written.len())
}
