//! Regional regression models: design construction, OLS fit, information
//! criteria and quadratic turning points.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::{log, sqrt};
use nalgebra::DMatrix;

use super::linalg::{centered_ss, from_columns, least_squares};
use super::special::{f_sf, t_two_sided};
use super::transform::{apply, estimate_lambda, log_jacobian, Lambda, Transform};
use super::StatsError;
use crate::types::{EconomicRow, UfCode};

/// Responses are beneficiaries per thousand inhabitants.
pub const RATIO_SCALE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regressor {
    /// X1
    Hdi,
    /// X2
    Income,
    /// X3
    LifeExpectancy,
    /// X4
    Density,
}

impl Regressor {
    pub const ALL: [Regressor; 4] = [Regressor::Hdi, Regressor::Income, Regressor::LifeExpectancy, Regressor::Density];

    pub fn symbol(self) -> &'static str {
        match self {
            Regressor::Hdi => "X1",
            Regressor::Income => "X2",
            Regressor::LifeExpectancy => "X3",
            Regressor::Density => "X4",
        }
    }

    pub fn value(self, row: &EconomicRow) -> f64 {
        match self {
            Regressor::Hdi => row.hdi,
            Regressor::Income => row.income_pc,
            Regressor::LifeExpectancy => row.le_birth,
            Regressor::Density => row.density,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Response {
    /// Y: all beneficiaries.
    Total,
    /// Y1
    Elderly,
    /// Y2
    Disabled,
}

impl Response {
    pub const ALL: [Response; 3] = [Response::Total, Response::Elderly, Response::Disabled];

    pub fn label(self) -> &'static str {
        match self {
            Response::Total => "total",
            Response::Elderly => "elderly",
            Response::Disabled => "disabled",
        }
    }

    pub fn value(self, row: &EconomicRow) -> f64 {
        let count = match self {
            Response::Total => row.bnf_total,
            Response::Elderly => row.bnf_elderly,
            Response::Disabled => row.bnf_disabled,
        };
        count as f64 / row.population as f64 * RATIO_SCALE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Power {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub regressor: Regressor,
    pub power: Power,
}

impl Term {
    pub fn linear(regressor: Regressor) -> Self {
        Self { regressor, power: Power::Linear }
    }

    pub fn quadratic(regressor: Regressor) -> Self {
        Self { regressor, power: Power::Quadratic }
    }

    pub fn name(&self) -> String {
        match self.power {
            Power::Linear => String::from(self.regressor.symbol()),
            Power::Quadratic => format!("{}^2", self.regressor.symbol()),
        }
    }

    fn value(&self, row: &EconomicRow) -> f64 {
        let v = self.regressor.value(row);
        match self.power {
            Power::Linear => v,
            Power::Quadratic => v * v,
        }
    }
}

/// A candidate regression: response, regressor terms (an intercept is always
/// included) and the response transform.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    pub response: Response,
    pub terms: Vec<Term>,
    pub transform: Transform,
}

impl DesignSpec {
    pub fn linear(response: Response, regressors: &[Regressor]) -> Self {
        Self { response, terms: regressors.iter().copied().map(Term::linear).collect(), transform: Transform::None }
    }

    /// Linear and squared term for every regressor.
    pub fn quadratic(response: Response, regressors: &[Regressor]) -> Self {
        let mut terms: Vec<Term> = regressors.iter().copied().map(Term::linear).collect();
        terms.extend(regressors.iter().copied().map(Term::quadratic));
        Self { response, terms, transform: Transform::None }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    /// Short tag: `linear`, `quadratic`, `box-cox` or `yeo-johnson`.
    pub fn approach(&self) -> &'static str {
        match self.transform {
            Transform::None if self.terms.iter().any(|t| t.power == Power::Quadratic) => "quadratic",
            Transform::None => "linear",
            t => t.label(),
        }
    }
}

/// Column names and model matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub matrix: DMatrix<f64>,
    pub has_intercept: bool,
}

impl Design {
    pub fn new(names: Vec<String>, matrix: DMatrix<f64>, has_intercept: bool) -> Self {
        Self { names, matrix, has_intercept }
    }

    /// Intercept column followed by the design terms.
    pub fn from_rows(spec: &DesignSpec, rows: &[EconomicRow]) -> Self {
        let mut names = vec![String::from("(Intercept)")];
        let mut cols = vec![vec![1.0; rows.len()]];
        for t in &spec.terms {
            names.push(t.name());
            cols.push(rows.iter().map(|r| t.value(r)).collect());
        }
        Self { names, matrix: from_columns(&cols), has_intercept: true }
    }

    pub fn nobs(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Columns other than the intercept.
    pub fn regressor_columns(&self) -> DMatrix<f64> {
        if self.has_intercept {
            self.matrix.columns(1, self.ncols() - 1).into_owned()
        } else {
            self.matrix.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub spec: Option<DesignSpec>,
    pub design: Design,
    /// UF of each observation, when fitted from regional rows.
    pub ufs: Vec<UfCode>,
    /// Observed min and max of each regressor used.
    pub ranges: Vec<(Regressor, f64, f64)>,
    /// Untransformed response.
    pub raw_response: Vec<f64>,
    /// Response on the modelling scale.
    pub response: Vec<f64>,
    pub lambda: Option<f64>,
    pub lambda_estimated: bool,
    pub coefficients: Vec<Coefficient>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub leverage: Vec<f64>,
    pub rss: f64,
    /// Residual standard error.
    pub sigma: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_statistic: f64,
    pub f_p_value: f64,
    pub log_likelihood: f64,
    /// Parameters counted by the information criteria.
    pub n_params: usize,
    pub aic: f64,
    pub bic: f64,
}

impl FittedModel {
    pub fn nobs(&self) -> usize {
        self.residuals.len()
    }

    /// Number of coefficients.
    pub fn k(&self) -> usize {
        self.coefficients.len()
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    /// Quadratic vertices of the fitted regressors.
    pub fn turning_points(&self) -> Vec<TurningPoint> {
        let Some(spec) = &self.spec else { return Vec::new() };
        let pairs: Vec<(Term, f64)> =
            spec.terms.iter().copied().zip(self.coefficients.iter().skip(1).map(|c| c.estimate)).collect();
        let mut tps = turning_points(&pairs);
        for tp in &mut tps {
            if let (Some(v), Some(&(_, lo, hi))) = (tp.vertex(), self.ranges.iter().find(|r| r.0 == tp.regressor)) {
                tp.inside_range = Some(lo <= v && v <= hi);
            }
        }
        tps
    }
}

/// Fits `spec` on regional rows, resolving an estimated transform parameter.
pub fn fit_ols(spec: &DesignSpec, rows: &[EconomicRow]) -> Result<FittedModel, StatsError> {
    if spec.terms.is_empty() {
        return Err(StatsError::EmptySpec);
    }
    if rows.iter().any(|r| r.population == 0) {
        return Err(StatsError::Domain("population must be positive"));
    }
    let design = Design::from_rows(spec, rows);
    let y: Vec<f64> = rows.iter().map(|r| spec.response.value(r)).collect();
    let mut regs: Vec<Regressor> = spec.terms.iter().map(|t| t.regressor).collect();
    regs.sort();
    regs.dedup();
    let ranges = regs
        .into_iter()
        .map(|reg| {
            let vals = rows.iter().map(|r| reg.value(r));
            let lo = vals.clone().fold(f64::INFINITY, f64::min);
            let hi = vals.fold(f64::NEG_INFINITY, f64::max);
            (reg, lo, hi)
        })
        .collect();
    let mut model = fit_design(design, y, spec.transform)?;
    model.spec = Some(spec.clone());
    model.ufs = rows.iter().map(|r| r.uf).collect();
    model.ranges = ranges;
    Ok(model)
}

/// Fits a prepared design. `raw_response` is transformed per `transform`.
pub fn fit_design(design: Design, raw_response: Vec<f64>, transform: Transform) -> Result<FittedModel, StatsError> {
    let (lambda, lambda_estimated, family) = match transform {
        Transform::None => (None, false, None),
        Transform::BoxCox(l) | Transform::YeoJohnson(l) => {
            let family = transform.family().expect("transform has a family");
            match l {
                Lambda::Fixed(v) if v.is_finite() => (Some(v), false, Some(family)),
                Lambda::Fixed(_) => return Err(StatsError::Domain("transform parameter must be finite")),
                Lambda::Estimate => (Some(estimate_lambda(&raw_response, &design.matrix, family)?), true, Some(family)),
            }
        }
    };
    let (response, jacobian) = match (family, lambda) {
        (Some(f), Some(l)) => (apply(f, &raw_response, l)?, log_jacobian(f, &raw_response, l)),
        _ => (raw_response.clone(), 0.0),
    };
    let ls = least_squares(&design.matrix, &response)?;
    let n = design.nobs();
    let k = design.ncols();
    let nf = n as f64;
    let df_resid = n.saturating_sub(k);
    let sigma2 = if df_resid > 0 { ls.rss / df_resid as f64 } else { f64::NAN };

    let coefficients = design
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = ls.coefficients[j];
            let std_error = sqrt(sigma2 * ls.xtx_inv[(j, j)]);
            let t_value = estimate / std_error;
            let p_value = if df_resid > 0 { t_two_sided(t_value, df_resid as f64) } else { f64::NAN };
            Coefficient { name: name.clone(), estimate, std_error, t_value, p_value }
        })
        .collect();

    let tss = if design.has_intercept { centered_ss(&response) } else { response.iter().map(|v| v * v).sum() };
    let r2 = if tss > 0.0 {
        (1.0 - ls.rss / tss).clamp(0.0, 1.0)
    } else if ls.rss == 0.0 {
        1.0
    } else {
        0.0
    };
    let adj_r2 =
        if design.has_intercept && n > k { (1.0 - (1.0 - r2) * (nf - 1.0) / df_resid as f64).min(r2) } else { r2 };
    let (f_statistic, f_p_value) = if design.has_intercept && k > 1 && df_resid > 0 && ls.rss > 0.0 {
        let f = ((tss - ls.rss) / (k - 1) as f64) / (ls.rss / df_resid as f64);
        (f, f_sf(f, (k - 1) as f64, df_resid as f64))
    } else {
        (f64::NAN, f64::NAN)
    };

    let log_likelihood = -0.5 * nf * (log(2.0 * core::f64::consts::PI) + log(ls.rss / nf) + 1.0) + jacobian;
    let n_params = k + 1 + usize::from(lambda_estimated);
    let aic = -2.0 * log_likelihood + 2.0 * n_params as f64;
    let bic = -2.0 * log_likelihood + log(nf) * n_params as f64;

    Ok(FittedModel {
        spec: None,
        design,
        ufs: Vec::new(),
        ranges: Vec::new(),
        raw_response,
        response,
        lambda,
        lambda_estimated,
        coefficients,
        fitted: ls.fitted,
        residuals: ls.residuals,
        leverage: ls.leverage,
        rss: ls.rss,
        sigma: sqrt(sigma2),
        r2,
        adj_r2,
        f_statistic,
        f_p_value,
        log_likelihood,
        n_params,
        aic,
        bic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vertex {
    At(f64),
    /// The regressor enters only through its square.
    NoLinearTerm,
    ZeroCurvature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    pub regressor: Regressor,
    pub vertex: Vertex,
    /// Whether the vertex lies within the observed regressor range, when known.
    pub inside_range: Option<bool>,
}

impl TurningPoint {
    pub fn vertex(&self) -> Option<f64> {
        match self.vertex {
            Vertex::At(v) => Some(v),
            _ => None,
        }
    }
}

/// Vertex `-b1 / (2 b2)` for every regressor carrying a squared term.
///
/// Takes `(term, coefficient)` pairs so printed coefficient sets can be
/// checked without a fit.
pub fn turning_points(terms: &[(Term, f64)]) -> Vec<TurningPoint> {
    let mut out: Vec<TurningPoint> = Vec::new();
    for &(term, b2) in terms.iter().filter(|(t, _)| t.power == Power::Quadratic) {
        if out.iter().any(|tp| tp.regressor == term.regressor) {
            continue;
        }
        let b1 = terms.iter().find(|(t, _)| t.regressor == term.regressor && t.power == Power::Linear).map(|(_, c)| *c);
        let vertex = match b1 {
            _ if b2 == 0.0 => Vertex::ZeroCurvature,
            None => Vertex::NoLinearTerm,
            Some(b1) => Vertex::At(-b1 / (2.0 * b2)),
        };
        out.push(TurningPoint { regressor: term.regressor, vertex, inside_range: None });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    fn row(i: u8, income: f64, le: f64, pop: u64, total: u64) -> EconomicRow {
        EconomicRow {
            uf: UfCode::new(i).unwrap(),
            hdi: 0.6 + 0.01 * f64::from(i),
            income_pc: income,
            le_birth: le,
            density: 10.0 + f64::from(i),
            population: pop,
            bnf_total: total,
            bnf_elderly: total / 2,
            bnf_disabled: total - total / 2,
        }
    }

    #[test]
    fn exact_linear_fit() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let d = Design::new(vec!["(Intercept)".into(), "x".into()], from_columns(&[vec![1.0; 10], x]), true);
        let m = fit_design(d, y, Transform::None).unwrap();
        assert!(m.residuals.iter().all(|e| e.abs() < 1e-12));
        assert_eq!(m.r2, 1.0);
        assert!(m.adj_r2 <= m.r2);
    }

    #[test]
    fn intercept_only_has_zero_r2() {
        let y = vec![1.0, 4.0, 2.0, 8.0, 5.0];
        let d = Design::new(vec!["(Intercept)".into()], from_columns(&[vec![1.0; 5]]), true);
        let m = fit_design(d, y, Transform::None).unwrap();
        assert!(m.r2.abs() < 1e-12);
        assert!((m.coefficients[0].estimate - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_information_criteria() {
        // Against hand-derived values for a 5-point line fit.
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![1.1, 1.9, 3.2, 3.9, 5.1];
        let d = Design::new(vec!["(Intercept)".into(), "x".into()], from_columns(&[vec![1.0; 5], x]), true);
        let m = fit_design(d, y, Transform::None).unwrap();
        let n = 5.0f64;
        let ll = -0.5 * n * ((2.0 * core::f64::consts::PI).ln() + (m.rss / n).ln() + 1.0);
        assert!((m.log_likelihood - ll).abs() < 1e-12);
        assert!((m.aic - (-2.0 * ll + 6.0)).abs() < 1e-12);
        assert!((m.bic - (-2.0 * ll + 3.0 * n.ln())).abs() < 1e-12);
        assert_eq!(m.n_params, 3);
    }

    #[test]
    fn recovers_known_coefficients() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let mut inside = 0;
        for _ in 0..200 {
            let x: Vec<f64> = (0..27).map(|_| rng.random_range(0.0..10.0)).collect();
            let y: Vec<f64> = x.iter().map(|v| 1.0 + 0.5 * v + rng.sample::<f64, _>(StandardNormal)).collect();
            let d = Design::new(vec!["c".into(), "x".into()], from_columns(&[vec![1.0; 27], x]), true);
            let m = fit_design(d, y, Transform::None).unwrap();
            let c = &m.coefficients[1];
            // 95% interval with t(25) critical value 2.0595
            if (c.estimate - 0.5).abs() <= 2.0595 * c.std_error {
                inside += 1;
            }
        }
        assert!((180..=200).contains(&inside), "{inside}");
    }

    #[test]
    fn fits_regional_rows_with_estimated_transform() {
        let rows: Vec<_> = (1..=27u8)
            .map(|i| {
                let inc = 600.0 + 70.0 * f64::from(i);
                let le = 66.0 + 0.4 * f64::from((i * 7) % 27);
                let ratio = 30.0 - 0.01 * inc + 3e-6 * inc * inc + 0.1 * f64::from(i % 5);
                row(i, inc, le, 1_000_000, (ratio * 1000.0) as u64)
            })
            .collect();
        let spec = DesignSpec::quadratic(Response::Total, &[Regressor::Income, Regressor::LifeExpectancy])
            .with_transform(Transform::YeoJohnson(Lambda::Estimate));
        let m = fit_ols(&spec, &rows).unwrap();
        assert_eq!(m.design.names, ["(Intercept)", "X2", "X3", "X2^2", "X3^2"]);
        assert!(m.lambda_estimated && m.lambda.unwrap().abs() <= 3.0);
        assert_eq!(m.n_params, 7);
        assert_eq!(m.ufs.len(), 27);
        assert_eq!(spec.approach(), "yeo-johnson");
        assert_eq!(m.turning_points().len(), 2);
    }

    #[test]
    fn no_terms_and_singular_design() {
        let rows: Vec<_> = (1..=5u8).map(|i| row(i, 1000.0, 70.0, 100, 5)).collect();
        let spec = DesignSpec { response: Response::Total, terms: vec![], transform: Transform::None };
        assert_eq!(fit_ols(&spec, &rows), Err(StatsError::EmptySpec));
        let spec = DesignSpec::linear(Response::Total, &[Regressor::Income]);
        assert_eq!(fit_ols(&spec, &rows), Err(StatsError::Singular));
    }

    #[test]
    fn printed_vertices() {
        let pairs = [
            (Term::linear(Regressor::Income), -8.41e-4),
            (Term::linear(Regressor::LifeExpectancy), 2.372),
            (Term::quadratic(Regressor::Income), 2.942e-7),
            (Term::quadratic(Regressor::LifeExpectancy), -1.605e-2),
        ];
        let tps = turning_points(&pairs);
        assert!((tps[0].vertex().unwrap() - 1429.3).abs() < 0.1);
        assert!((tps[1].vertex().unwrap() - 73.89).abs() < 0.01);
        let only_sq = [(Term::quadratic(Regressor::Income), 1.4e-7)];
        assert_eq!(turning_points(&only_sq)[0].vertex, Vertex::NoLinearTerm);
        let flat = [(Term::linear(Regressor::Income), 1.0), (Term::quadratic(Regressor::Income), 0.0)];
        assert_eq!(turning_points(&flat)[0].vertex, Vertex::ZeroCurvature);
    }
}
