//! Regression modelling of regional beneficiary ratios and the diagnostic
//! battery used to filter and rank candidate models.

pub mod diagnostics;
pub mod linalg;
pub mod ols;
pub mod selection;
pub mod special;
pub mod transform;

pub use diagnostics::{
    diagnose, influence, jarque_bera, koenker_test, plot_data, rainbow_test, reset_test, vif, Battery,
    DiagnosticOptions, Influence, PlotData, Vif,
};
pub use ols::{
    fit_design, fit_ols, turning_points, Coefficient, Design, DesignSpec, FittedModel, Power, Regressor, Response,
    Term, TurningPoint, Vertex,
};
pub use selection::{select_model, Selection, SelectionEntry, Status};
pub use transform::{box_cox, estimate_lambda, yeo_johnson, Family, Lambda, Transform};

/// Default significance level.
pub const DEFAULT_ALPHA: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("design matrix is rank deficient")]
    Singular,
    #[error("non-finite value in data")]
    NonFinite,
    #[error("too few observations: need {needed}, found {found}")]
    TooFewObservations { needed: usize, found: usize },
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("degenerate data: {0}")]
    Degenerate(&'static str),
    #[error("model has no regressors")]
    EmptySpec,
    #[error("no candidate models")]
    NoCandidates,
}

/// Outcome of a hypothesis test at level `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub name: &'static str,
    pub statistic: f64,
    pub df1: f64,
    /// Denominator degrees of freedom for F tests.
    pub df2: Option<f64>,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

impl TestResult {
    pub fn new(name: &'static str, statistic: f64, df1: f64, df2: Option<f64>, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self { name, statistic, df1, df2, p_value, alpha, reject: p_value < alpha }
    }
}
