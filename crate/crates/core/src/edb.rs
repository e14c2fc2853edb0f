//! Expected discounted benefit (EDB).
//!
//! Each elderly beneficiary receives `b` at the end of every whole month of
//! expected remaining lifetime past the reference date. The individual value
//! is `b * a(LT, r)`; totals are aggregated by (UF, sex), UF, sex and nation.
//!
//! Summation runs over entries sorted by `(uf, sex, id, birth_date)` with
//! pairwise reduction, so totals do not depend on input order.

use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use libm::round;

use crate::annuity::{annuity_pv, AnnuityError, MonthlyRate};
use crate::reference::{LeColumn, LifeTable};
use crate::types::{age_in_months, BeneficiaryRecord, BenefitKind, MoneyConfig, Sex, UfCode};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EdbError {
    #[error("no life expectancy for UF {0}")]
    MissingUf(UfCode),
    #[error("record {0} is not an elderly benefit")]
    NotElderly(String),
    #[error("record {0} is a survivor entitlement")]
    Survivor(String),
    #[error("record {0} is born after the reference date")]
    BornAfterReference(String),
    #[error(transparent)]
    Rate(#[from] AnnuityError),
}

/// Which expectancy column drives remaining lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeBasis {
    AtBirth,
    At65,
}

impl LeBasis {
    pub fn column(self) -> LeColumn {
        match self {
            LeBasis::AtBirth => LeColumn::Birth,
            LeBasis::At65 => LeColumn::After65,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LeBasis::AtBirth => "birth",
            LeBasis::At65 => "at65",
        }
    }
}

/// Whole months of expected life left after the reference date.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemainingLifetime {
    pub months: u32,
    pub basis: LeBasis,
}

/// `max(0, round(12 * expected_age_at_death - age_in_months))`.
pub fn remaining_months(expected_age_at_death: f64, age_months: u32, basis: LeBasis) -> RemainingLifetime {
    let m = round(expected_age_at_death * 12.0 - f64::from(age_months));
    let months = if m > 0.0 { m as u32 } else { 0 };
    RemainingLifetime { months, basis }
}

/// Benefit amount and monthly discount rate, validated once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Valuation {
    pub benefit: f64,
    pub rate: MonthlyRate,
}

impl Valuation {
    pub fn new(cfg: &MoneyConfig) -> Result<Self, AnnuityError> {
        if !(cfg.benefit > 0.0 && cfg.benefit.is_finite()) {
            return Err(AnnuityError::Benefit(cfg.benefit));
        }
        Ok(Self { benefit: cfg.benefit, rate: MonthlyRate::from_annual(cfg.annual_rate)? })
    }

    /// Present value of `months` benefit payments.
    pub fn value(&self, months: u32) -> f64 {
        self.benefit * annuity_pv(months, self.rate)
    }
}

pub fn edb_individual(lt: RemainingLifetime, valuation: &Valuation) -> f64 {
    valuation.value(lt.months)
}

pub fn currency_convert(eur: f64, cfg: &MoneyConfig) -> f64 {
    eur * cfg.exchange_rate
}

/// An analysis-set beneficiary with its remaining lifetime resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LifetimeEntry {
    pub id: String,
    pub uf: UfCode,
    pub sex: Sex,
    pub birth_date: NaiveDate,
    pub age_months: u32,
    pub lt_months: u32,
}

/// Resolves remaining lifetimes for elderly non-survivor records using the
/// UF x sex expectancy of `basis`. The result is sorted by
/// `(uf, sex, id, birth_date)`.
pub fn assign_lifetimes<'a, I>(
    records: I,
    table: &LifeTable,
    basis: LeBasis,
    reference_date: NaiveDate,
) -> Result<Vec<LifetimeEntry>, EdbError>
where
    I: IntoIterator<Item = &'a BeneficiaryRecord>,
{
    let mut out = Vec::new();
    for rec in records {
        if rec.kind != BenefitKind::Elderly {
            return Err(EdbError::NotElderly(rec.id.clone()));
        }
        if rec.survivor {
            return Err(EdbError::Survivor(rec.id.clone()));
        }
        let le = table.years(rec.uf, basis.column(), rec.sex.into()).ok_or(EdbError::MissingUf(rec.uf))?;
        let age_months = age_in_months(rec.birth_date, reference_date)
            .ok_or_else(|| EdbError::BornAfterReference(rec.id.clone()))?;
        out.push(LifetimeEntry {
            id: rec.id.clone(),
            uf: rec.uf,
            sex: rec.sex,
            birth_date: rec.birth_date,
            age_months,
            lt_months: remaining_months(le, age_months, basis).months,
        });
    }
    out.sort_by(|a, b| (a.uf, a.sex, &a.id, a.birth_date).cmp(&(b.uf, b.sex, &b.id, b.birth_date)));
    Ok(out)
}

/// Pairwise (cascade) summation in slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().fold(0.0, |acc, x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    UfSex,
    Uf,
    Sex,
    Nation,
}

impl GroupKind {
    pub fn label(self) -> &'static str {
        match self {
            GroupKind::UfSex => "uf_sex",
            GroupKind::Uf => "uf",
            GroupKind::Sex => "sex",
            GroupKind::Nation => "nation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdbRow {
    pub kind: GroupKind,
    pub uf: Option<UfCode>,
    pub sex: Option<Sex>,
    pub count: usize,
    pub total: f64,
    pub per_capita: f64,
    /// Percentage of the national total.
    pub share_pct: f64,
    /// Running share within `kind` when groups are ranked by descending total
    /// (ties by listing order).
    pub cum_share_pct: f64,
}

/// Aggregated EDB at every group level.
///
/// Rows are listed as all (UF, sex) pairs in table order with male first,
/// then UFs, then the two sexes, then the nation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdbReport {
    pub basis: LeBasis,
    pub rows: Vec<EdbRow>,
}

impl EdbReport {
    fn find(&self, kind: GroupKind, uf: Option<UfCode>, sex: Option<Sex>) -> Option<&EdbRow> {
        self.rows.iter().find(|r| r.kind == kind && r.uf == uf && r.sex == sex)
    }

    pub fn uf_sex(&self, uf: UfCode, sex: Sex) -> Option<&EdbRow> {
        self.find(GroupKind::UfSex, Some(uf), Some(sex))
    }

    pub fn uf(&self, uf: UfCode) -> Option<&EdbRow> {
        self.find(GroupKind::Uf, Some(uf), None)
    }

    pub fn sex(&self, sex: Sex) -> &EdbRow {
        self.find(GroupKind::Sex, None, Some(sex)).expect("sex rows always present")
    }

    pub fn nation(&self) -> &EdbRow {
        self.find(GroupKind::Nation, None, None).expect("nation row always present")
    }

    pub fn rows_of(&self, kind: GroupKind) -> impl Iterator<Item = &EdbRow> {
        self.rows.iter().filter(move |r| r.kind == kind)
    }
}

fn row(kind: GroupKind, uf: Option<UfCode>, sex: Option<Sex>, count: usize, total: f64) -> EdbRow {
    let per_capita = if count == 0 { 0.0 } else { total / count as f64 };
    EdbRow { kind, uf, sex, count, total, per_capita, share_pct: 0.0, cum_share_pct: 0.0 }
}

/// Aggregates sorted lifetime entries over the UFs in `ufs`.
pub fn aggregate_lifetimes(
    entries: &[LifetimeEntry],
    ufs: &[UfCode],
    valuation: &Valuation,
    basis: LeBasis,
) -> EdbReport {
    aggregate_with(entries, ufs, basis, |e| valuation.value(e.lt_months))
}

pub(crate) fn aggregate_with<F>(entries: &[LifetimeEntry], ufs: &[UfCode], basis: LeBasis, value: F) -> EdbReport
where
    F: Fn(&LifetimeEntry) -> f64,
{
    let mut ufs = ufs.to_vec();
    ufs.sort();
    ufs.dedup();

    let mut cell_totals = Vec::with_capacity(ufs.len() * 2);
    let mut rows = Vec::with_capacity(ufs.len() * 3 + 3);
    for &uf in &ufs {
        for sex in Sex::BOTH {
            let values: Vec<f64> = entries.iter().filter(|e| e.uf == uf && e.sex == sex).map(&value).collect();
            let total = pairwise_sum(&values);
            cell_totals.push((uf, sex, values.len(), total));
            rows.push(row(GroupKind::UfSex, Some(uf), Some(sex), values.len(), total));
        }
    }
    for &uf in &ufs {
        let cells: Vec<_> = cell_totals.iter().filter(|c| c.0 == uf).collect();
        let count = cells.iter().map(|c| c.2).sum();
        let total = cells.iter().fold(0.0, |acc, c| acc + c.3);
        rows.push(row(GroupKind::Uf, Some(uf), None, count, total));
    }
    let mut sex_totals = [0.0; 2];
    let mut sex_counts = [0usize; 2];
    for (k, sex) in Sex::BOTH.into_iter().enumerate() {
        let totals: Vec<f64> = cell_totals.iter().filter(|c| c.1 == sex).map(|c| c.3).collect();
        sex_totals[k] = pairwise_sum(&totals);
        sex_counts[k] = cell_totals.iter().filter(|c| c.1 == sex).map(|c| c.2).sum();
        rows.push(row(GroupKind::Sex, None, Some(sex), sex_counts[k], sex_totals[k]));
    }
    let national = sex_totals[0] + sex_totals[1];
    rows.push(row(GroupKind::Nation, None, None, sex_counts[0] + sex_counts[1], national));

    for kind in [GroupKind::UfSex, GroupKind::Uf, GroupKind::Sex, GroupKind::Nation] {
        let mut idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].kind == kind).collect();
        for &i in &idx {
            rows[i].share_pct = if national > 0.0 { 100.0 * rows[i].total / national } else { 0.0 };
        }
        idx.sort_by(|&a, &b| rows[b].total.total_cmp(&rows[a].total).then(a.cmp(&b)));
        let mut running = 0.0;
        for i in idx {
            running += rows[i].share_pct;
            rows[i].cum_share_pct = running;
        }
    }
    EdbReport { basis, rows }
}

/// Full EDB pass: resolve lifetimes, value each person, aggregate.
pub fn edb_aggregate<'a, I>(
    records: I,
    table: &LifeTable,
    cfg: &MoneyConfig,
    basis: LeBasis,
) -> Result<EdbReport, EdbError>
where
    I: IntoIterator<Item = &'a BeneficiaryRecord>,
{
    let valuation = Valuation::new(cfg)?;
    let entries = assign_lifetimes(records, table, basis, cfg.reference_date)?;
    Ok(aggregate_lifetimes(&entries, &table.ufs(), &valuation, basis))
}
