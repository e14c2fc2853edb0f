//! Residual diagnostics: normality, specification, linearity and
//! heteroskedasticity tests, collinearity and influence measures.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};
use nalgebra::DMatrix;

use super::linalg::{centered_ss, from_columns, least_squares, mean};
use super::ols::{Design, FittedModel};
use super::special::{chi2_sf, f_sf, normal_quantile};
use super::{StatsError, TestResult, DEFAULT_ALPHA};

/// Tuning shared by the test battery.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticOptions {
    pub alpha: f64,
    pub reset_powers: Vec<u32>,
    pub rainbow_fraction: f64,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        Self { alpha: DEFAULT_ALPHA, reset_powers: vec![2, 3], rainbow_fraction: 0.5 }
    }
}

/// Jarque-Bera normality test on population skewness and kurtosis.
pub fn jarque_bera(residuals: &[f64], alpha: f64) -> Result<TestResult, StatsError> {
    let n = residuals.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { needed: 3, found: n });
    }
    let nf = n as f64;
    let m = mean(residuals);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &e in residuals {
        let d = e - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if !(m2 > 0.0) {
        return Err(StatsError::Degenerate("residuals have zero variance"));
    }
    let skew = m3 / (m2 * sqrt(m2));
    let kurt = m4 / (m2 * m2);
    let jb = nf / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
    Ok(TestResult::new("jarque-bera", jb, 2.0, None, chi2_sf(jb, 2.0), alpha))
}

/// Ramsey RESET: F test on powers of the scaled fitted values added to the
/// design.
pub fn reset_test(model: &FittedModel, powers: &[u32], alpha: f64) -> Result<TestResult, StatsError> {
    let n = model.nobs();
    let k = model.k();
    let q = powers.len();
    if q == 0 || powers.iter().any(|&p| p < 2) {
        return Err(StatsError::Domain("RESET powers must be at least 2"));
    }
    if n <= k + q {
        return Err(StatsError::TooFewObservations { needed: k + q + 1, found: n });
    }
    let scale = model.fitted.iter().fold(0.0f64, |a, v| a.max(fabs(*v)));
    if !(scale > 0.0) {
        return Err(StatsError::Degenerate("fitted values are all zero"));
    }
    let x = &model.design.matrix;
    let mut aug = x.clone().resize_horizontally(k + q, 0.0);
    for (j, &p) in powers.iter().enumerate() {
        for i in 0..n {
            aug[(i, k + j)] = libm::pow(model.fitted[i] / scale, f64::from(p));
        }
    }
    let full = least_squares(&aug, &model.response)?;
    let df2 = (n - k - q) as f64;
    if !(full.rss > 0.0) {
        return Err(StatsError::Degenerate("augmented model fits exactly"));
    }
    let f = ((model.rss - full.rss).max(0.0) / q as f64) / (full.rss / df2);
    Ok(TestResult::new("reset", f, q as f64, Some(df2), f_sf(f, q as f64, df2), alpha))
}

/// Rainbow test: refits on the `fraction` of observations with the lowest
/// leverage and compares residual variances.
pub fn rainbow_test(model: &FittedModel, fraction: f64, alpha: f64) -> Result<TestResult, StatsError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(StatsError::Domain("central fraction must lie in (0, 1)"));
    }
    let n = model.nobs();
    let k = model.k();
    let m = libm::floor(fraction * n as f64) as usize;
    if m < k + 1 {
        return Err(StatsError::TooFewObservations { needed: k + 1, found: m });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| model.leverage[a].total_cmp(&model.leverage[b]).then(a.cmp(&b)));
    order.truncate(m);
    order.sort_unstable();
    let x = &model.design.matrix;
    let sub_x = DMatrix::from_fn(m, k, |i, j| x[(order[i], j)]);
    let sub_y: Vec<f64> = order.iter().map(|&i| model.response[i]).collect();
    let sub = least_squares(&sub_x, &sub_y)?;
    if !(sub.rss > 0.0) {
        return Err(StatsError::Degenerate("central subset fits exactly"));
    }
    let df1 = (n - m) as f64;
    let df2 = (m - k) as f64;
    let f = ((model.rss - sub.rss).max(0.0) / df1) / (sub.rss / df2);
    Ok(TestResult::new("rainbow", f, df1, Some(df2), f_sf(f, df1, df2), alpha))
}

/// Koenker's studentized Breusch-Pagan test: `n R^2` from regressing squared
/// residuals on the model's regressors.
pub fn koenker_test(model: &FittedModel, alpha: f64) -> Result<TestResult, StatsError> {
    let n = model.nobs();
    let k = model.k();
    if n <= k + 1 {
        return Err(StatsError::TooFewObservations { needed: k + 2, found: n });
    }
    let regs = model.design.regressor_columns();
    let df = regs.ncols();
    if df == 0 {
        return Err(StatsError::Degenerate("no regressors to test against"));
    }
    let e2: Vec<f64> = model.residuals.iter().map(|e| e * e).collect();
    let tss = centered_ss(&e2);
    if tss <= f64::EPSILON * e2.iter().sum::<f64>() * e2.iter().sum::<f64>() {
        return Ok(TestResult::new("koenker", 0.0, df as f64, None, 1.0, alpha));
    }
    let aux = least_squares(&with_intercept(&regs), &e2)?;
    let r2 = (1.0 - aux.rss / tss).clamp(0.0, 1.0);
    let stat = n as f64 * r2;
    Ok(TestResult::new("koenker", stat, df as f64, None, chi2_sf(stat, df as f64), alpha))
}

fn with_intercept(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().insert_column(0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vif {
    pub name: String,
    /// `f64::INFINITY` under perfect collinearity.
    pub value: f64,
}

impl Vif {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Variance inflation factor of every non-intercept column.
pub fn vif(design: &Design) -> Result<Vec<Vif>, StatsError> {
    let regs = design.regressor_columns();
    let p = regs.ncols();
    if p < 2 {
        return Err(StatsError::TooFewObservations { needed: 2, found: p });
    }
    let names = if design.has_intercept { &design.names[1..] } else { &design.names[..] };
    let mut out = Vec::with_capacity(p);
    for (j, name) in names.iter().enumerate().take(p) {
        let target: Vec<f64> = regs.column(j).iter().copied().collect();
        let others = with_intercept(&regs.clone().remove_column(j));
        let tss = centered_ss(&target);
        let value = match least_squares(&others, &target) {
            _ if tss == 0.0 => f64::INFINITY,
            Ok(fit) => {
                let r2 = 1.0 - fit.rss / tss;
                if r2 >= 1.0 - 1e-12 {
                    f64::INFINITY
                } else {
                    1.0 / (1.0 - r2.max(0.0))
                }
            }
            Err(StatsError::Singular) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        out.push(Vif { name: name.clone(), value });
    }
    Ok(out)
}

/// Leverage, externally studentized residuals and Cook's distance with the
/// conventional flags: `h > 2k/n`, `|t| > 2`, `D > 4/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Influence {
    pub leverage: Vec<f64>,
    /// Undefined where `h = 1` or no residual degrees of freedom remain.
    pub studentized: Vec<Option<f64>>,
    pub cooks_distance: Vec<Option<f64>>,
    pub high_leverage: Vec<bool>,
    pub outlier: Vec<bool>,
    pub influential: Vec<bool>,
}

impl Influence {
    pub fn flagged(&self, i: usize) -> bool {
        self.high_leverage[i] || self.outlier[i] || self.influential[i]
    }
}

const LEVERAGE_ONE: f64 = 1.0 - 1e-10;

pub fn influence(model: &FittedModel) -> Influence {
    let n = model.nobs();
    let k = model.k();
    let nf = n as f64;
    let kf = k as f64;
    let s2 = if n > k { model.rss / (n - k) as f64 } else { f64::NAN };
    let mut studentized = Vec::with_capacity(n);
    let mut cooks_distance = Vec::with_capacity(n);
    for (i, &h) in model.leverage.iter().enumerate() {
        let e = model.residuals[i];
        if h >= LEVERAGE_ONE || n <= k + 1 {
            studentized.push(None);
            cooks_distance.push(None);
            continue;
        }
        let s2_i = (model.rss - e * e / (1.0 - h)) / (n - k - 1) as f64;
        studentized.push((s2_i > 0.0).then(|| e / sqrt(s2_i * (1.0 - h))));
        cooks_distance.push((s2 > 0.0).then(|| e * e * h / (kf * s2 * (1.0 - h) * (1.0 - h))));
    }
    let lev_cut = 2.0 * kf / nf;
    Influence {
        high_leverage: model.leverage.iter().map(|&h| h > lev_cut).collect(),
        outlier: studentized.iter().map(|t| t.is_some_and(|t| fabs(t) > 2.0)).collect(),
        influential: cooks_distance.iter().map(|d| d.is_some_and(|d| d > 4.0 / nf)).collect(),
        leverage: model.leverage.clone(),
        studentized,
        cooks_distance,
    }
}

/// Point sets behind the four standard residual panels.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    /// (fitted, residual)
    pub residual_fitted: Vec<(f64, f64)>,
    /// (theoretical quantile, sorted standardized residual)
    pub qq: Vec<(f64, f64)>,
    /// (fitted, sqrt |standardized residual|)
    pub scale_location: Vec<(f64, f64)>,
    /// (leverage, standardized residual)
    pub residual_leverage: Vec<(f64, f64)>,
}

pub fn plot_data(model: &FittedModel) -> PlotData {
    let n = model.nobs();
    let s = model.sigma;
    let std_res: Vec<f64> = model
        .residuals
        .iter()
        .zip(&model.leverage)
        .map(|(e, h)| if *h < LEVERAGE_ONE && s > 0.0 { e / (s * sqrt(1.0 - h)) } else { f64::NAN })
        .collect();
    let mut sorted: Vec<f64> = std_res.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let a = if m <= 10 { 3.0 / 8.0 } else { 0.5 };
    let qq = sorted
        .iter()
        .enumerate()
        .map(|(i, &r)| (normal_quantile((i as f64 + 1.0 - a) / (m as f64 + 1.0 - 2.0 * a)), r))
        .collect();
    PlotData {
        residual_fitted: (0..n).map(|i| (model.fitted[i], model.residuals[i])).collect(),
        qq,
        scale_location: (0..n).map(|i| (model.fitted[i], sqrt(fabs(std_res[i])))).collect(),
        residual_leverage: (0..n).map(|i| (model.leverage[i], std_res[i])).collect(),
    }
}

/// Every test in the battery; a test that cannot run holds its error.
#[derive(Debug, Clone, PartialEq)]
pub struct Battery {
    pub jarque_bera: Result<TestResult, StatsError>,
    pub reset: Result<TestResult, StatsError>,
    pub rainbow: Result<TestResult, StatsError>,
    pub koenker: Result<TestResult, StatsError>,
    pub vif: Result<Vec<Vif>, StatsError>,
}

pub fn diagnose(model: &FittedModel, opts: &DiagnosticOptions) -> Battery {
    Battery {
        jarque_bera: jarque_bera(&model.residuals, opts.alpha),
        reset: reset_test(model, &opts.reset_powers, opts.alpha),
        rainbow: rainbow_test(model, opts.rainbow_fraction, opts.alpha),
        koenker: koenker_test(model, opts.alpha),
        vif: vif(&model.design),
    }
}

/// Design with an intercept and the given regressor columns.
pub fn design_from_columns(columns: &[Vec<f64>]) -> Design {
    let n = columns.first().map_or(0, Vec::len);
    let mut cols = vec![vec![1.0; n]];
    cols.extend(columns.iter().cloned());
    let mut names = vec![String::from("(Intercept)")];
    names.extend((1..=columns.len()).map(|j| alloc::format!("x{j}")));
    Design::new(names, from_columns(&cols), true)
}
