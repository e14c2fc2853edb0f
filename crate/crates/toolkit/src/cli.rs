use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "pension-toolkit",
    version,
    about = "Benefit valuation, age adjusting factors, regional regression and clustering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Screen beneficiary records and report survivor exclusions.
    Validate(ValidateArgs),
    /// Expected discounted benefit by UF, sex and nation.
    Edb(EdbArgs),
    /// Age adjusting factors equalizing per-capita EDB.
    Aaf(AafArgs),
    /// Gap between male life expectancy at birth and the reform age.
    Reform(ReformArgs),
    /// Candidate regressions of regional beneficiary ratios with diagnostics.
    Regress(RegressArgs),
    /// Hierarchical and k-means clustering of UFs by life expectancy.
    Cluster(ClusterArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Edb(_) => "edb",
            Command::Aaf(_) => "aaf",
            Command::Reform(_) => "reform",
            Command::Regress(_) => "regress",
            Command::Cluster(_) => "cluster",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Annual discount rate.
    #[arg(long, default_value_t = 0.06)]
    pub rate: f64,
    /// Monthly benefit in EUR.
    #[arg(long, default_value_t = 1.0)]
    pub benefit: f64,
    /// BRL per EUR.
    #[arg(long, default_value_t = 4.35)]
    pub fx: f64,
    #[arg(long, default_value = "2018-04-06", value_parser = parse_date)]
    pub reference_date: NaiveDate,
    /// Output directory.
    #[arg(long, default_value = "pension-report")]
    pub out: PathBuf,
    /// Write only this format; both are written when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TableArg {
    /// Life-expectancy table CSV replacing the bundled one.
    #[arg(long)]
    pub life_table: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WindowArgs {
    #[arg(long, default_value = "2018-01-02", value_parser = parse_date)]
    pub window_start: NaiveDate,
    #[arg(long, default_value = "2018-04-06", value_parser = parse_date)]
    pub window_end: NaiveDate,
}

#[derive(Args, Debug, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub beneficiaries: PathBuf,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    At65,
    Birth,
    Both,
}

#[derive(Args, Debug, Serialize)]
pub struct EdbArgs {
    #[arg(long)]
    pub beneficiaries: PathBuf,
    #[arg(long, value_enum, default_value_t = BasisChoice::Both)]
    pub le_basis: BasisChoice,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub table: TableArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProposalChoice {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetChoice {
    PerSex,
    National,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SingleBasis {
    At65,
    Birth,
}

#[derive(Args, Debug, Serialize)]
pub struct AafArgs {
    #[arg(long)]
    pub beneficiaries: PathBuf,
    #[arg(long, value_enum, default_value_t = ProposalChoice::Both)]
    pub proposal: ProposalChoice,
    /// Target per-capita for proposal 1.
    #[arg(long, value_enum, default_value_t = TargetChoice::PerSex)]
    pub target: TargetChoice,
    #[arg(long, value_enum, default_value_t = SingleBasis::Birth)]
    pub le_basis: SingleBasis,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub table: TableArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct ReformArgs {
    #[command(flatten)]
    pub table: TableArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseChoice {
    Total,
    Elderly,
    Disabled,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct RegressArgs {
    #[arg(long)]
    pub economics: PathBuf,
    #[arg(long, value_enum, default_value_t = ResponseChoice::All)]
    pub response: ResponseChoice,
    /// Regressors among X1 (HDI), X2 (income), X3 (life expectancy), X4 (density).
    #[arg(long, value_delimiter = ',', default_value = "X1,X2,X3,X4")]
    pub regressors: Vec<String>,
    /// Significance level for the test battery.
    #[arg(long, default_value_t = 0.10)]
    pub alpha: f64,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub reset_powers: Vec<u32>,
    #[arg(long, default_value_t = 0.5)]
    pub rainbow_fraction: f64,
    /// Transform parameter: `estimate` or a number.
    #[arg(long, default_value = "estimate")]
    pub lambda: String,
    /// Write residual, QQ, scale-location and leverage point sets.
    #[arg(long)]
    pub emit_plot_data: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureChoice {
    Birth,
    After60,
    After65,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CohortChoice {
    Total,
    Male,
    Female,
    BySex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Single,
    Kmeans,
    Both,
}

#[derive(Args, Debug, Serialize)]
pub struct ClusterArgs {
    #[arg(long, value_enum, default_value_t = FeatureChoice::Birth)]
    pub features: FeatureChoice,
    #[arg(long, value_enum, default_value_t = CohortChoice::Total)]
    pub cohort: CohortChoice,
    #[arg(long, value_enum, default_value_t = MethodChoice::Single)]
    pub method: MethodChoice,
    #[arg(long, default_value_t = pension_core::cluster::DEFAULT_K)]
    pub k: usize,
    /// Seed for k-means; overrides PENSION_TOOLKIT_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub standardize: bool,
    #[command(flatten)]
    pub table: TableArg,
    #[command(flatten)]
    pub common: Common,
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("expected YYYY-MM-DD: {e}"))
}
