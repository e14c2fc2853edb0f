//! Benefit-age adjusting factors (AAF).
//!
//! For every group the per-capita EDB is compared with a national target,
//! `D = target - group`. A signed whole-month offset `w` is added to every
//! member's remaining lifetime (`MLT = max(0, LT + w)`) so the group's
//! recomputed per-capita EDB lands on the target. The factor is
//! `(65 * 12 + w) / (65 * 12)` and the new benefit age is `factor * 65`.
//!
//! Two offsets are reported:
//!
//! - `closed_form_w_months` solves `|D| = b * a(z, r)` with the sign of `D`.
//!   It ignores that the added months are paid after each member's current
//!   lifetime and are therefore discounted further, so it overshoots.
//! - `w_months` is the whole-month offset whose recomputed per-capita EDB is
//!   nearest the target (ties toward zero). This is the one that equalizes and
//!   the one the factor and new age are based on.

use alloc::vec::Vec;

use crate::annuity::{invert_annuity, AnnuityError, RoundingPolicy};
use crate::edb::{
    aggregate_lifetimes, assign_lifetimes, pairwise_sum, EdbError, EdbReport, LeBasis, LifetimeEntry, Valuation,
};
use crate::reference::{Cohort, LeColumn, LifeTable};
use crate::types::{BeneficiaryRecord, Hundredths, MoneyConfig, Sex, UfCode};

/// Current benefit age in months.
pub const BASE_AGE_MONTHS: i32 = 65 * 12;
/// Eligibility age under the proposed reform.
pub const REFORM_AGE_YEARS: i32 = 70;
const MAX_OFFSET_MONTHS: i64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AafError {
    #[error("difference {d} is not below the perpetuity value {perpetuity}")]
    Infeasible { d: f64, perpetuity: f64 },
    #[error(transparent)]
    Annuity(#[from] AnnuityError),
    #[error(transparent)]
    Edb(#[from] EdbError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Proposal {
    /// Factors per (UF, sex).
    One,
    /// Factors per UF.
    Two,
}

impl Proposal {
    pub fn number(self) -> u8 {
        match self {
            Proposal::One => 1,
            Proposal::Two => 2,
        }
    }
}

/// Target per-capita for the (UF, sex) proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Proposal1Target {
    /// National per-capita of the same sex.
    #[default]
    PerSex,
    /// National per-capita over both sexes.
    National,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AafOptions {
    pub basis: LeBasis,
    pub target: Proposal1Target,
}

impl Default for AafOptions {
    fn default() -> Self {
        Self { basis: LeBasis::AtBirth, target: Proposal1Target::PerSex }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AafResult {
    pub proposal: Proposal,
    pub uf: UfCode,
    /// `None` for proposal 2.
    pub sex: Option<Sex>,
    pub count: usize,
    pub per_capita: f64,
    pub target: f64,
    /// `target - per_capita`.
    pub d: f64,
    pub w_months: i32,
    pub z_months: u32,
    pub closed_form_w_months: i32,
    pub factor: f64,
    /// Years.
    pub new_age: f64,
    /// Per-capita EDB after applying `w_months`.
    pub per_capita_after: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Issue {
    EmptyGroup,
    Infeasible,
    /// Members whose shifted lifetime was floored at zero.
    Clamped(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupDiagnostic {
    pub uf: UfCode,
    pub sex: Option<Sex>,
    pub issue: Issue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AafReport {
    pub proposal: Proposal,
    pub results: Vec<AafResult>,
    pub diagnostics: Vec<GroupDiagnostic>,
}

pub fn benefit_difference(target_per_capita: f64, group_per_capita: f64) -> f64 {
    target_per_capita - group_per_capita
}

/// Signed month offset with `|d| = b * a(|w|, r)`, sign taken from `d`.
pub fn solve_offset(d: f64, valuation: &Valuation) -> Result<i32, AafError> {
    if d == 0.0 {
        return Ok(0);
    }
    let z =
        invert_annuity(d.abs(), valuation.benefit, valuation.rate, RoundingPolicy::Nearest).map_err(|e| match e {
            AnnuityError::Infeasible { perpetuity, .. } => AafError::Infeasible { d, perpetuity },
            other => AafError::Annuity(other),
        })?;
    let z = i32::try_from(z)
        .map_err(|_| AafError::Infeasible { d, perpetuity: valuation.benefit / valuation.rate.value() })?;
    Ok(if d < 0.0 { -z } else { z })
}

pub fn factor_for(w_months: i32) -> f64 {
    f64::from(BASE_AGE_MONTHS + w_months) / f64::from(BASE_AGE_MONTHS)
}

pub fn new_age_for(w_months: i32) -> f64 {
    f64::from(BASE_AGE_MONTHS + w_months) / 12.0
}

fn shifted(lt: u32, w: i64) -> u32 {
    (i64::from(lt) + w).clamp(0, i64::from(u32::MAX)) as u32
}

/// Per-capita EDB of a group after shifting every lifetime by `w` months.
pub fn per_capita_with_offset(lts: &[u32], w: i64, valuation: &Valuation) -> f64 {
    if lts.is_empty() {
        return 0.0;
    }
    let vals: Vec<f64> = lts.iter().map(|&lt| valuation.value(shifted(lt, w))).collect();
    pairwise_sum(&vals) / lts.len() as f64
}

/// Whole-month offset whose recomputed per-capita EDB is nearest `target`.
pub fn equalizing_offset(lts: &[u32], target: f64, valuation: &Valuation) -> Result<i32, AafError> {
    let r = valuation.rate.value();
    if r > 0.0 && target >= valuation.benefit / r {
        return Err(AafError::Infeasible { d: target, perpetuity: valuation.benefit / r });
    }
    if lts.is_empty() || !(target >= 0.0) {
        return Err(AafError::Annuity(AnnuityError::NegativeTarget(target)));
    }
    let pc = |w: i64| per_capita_with_offset(lts, w, valuation);
    let nearest = |a: i64, b: i64| {
        // prefer the candidate closer to zero on ties
        let (da, db) = ((pc(a) - target).abs(), (pc(b) - target).abs());
        if da < db || (da == db && a.abs() <= b.abs()) {
            a
        } else {
            b
        }
    };
    let at0 = pc(0);
    let w = if at0 == target {
        0
    } else if at0 < target {
        let mut lo = 0i64;
        let mut hi = 1i64;
        while pc(hi) < target {
            lo = hi;
            hi *= 2;
            if hi > MAX_OFFSET_MONTHS {
                return Err(AafError::Infeasible { d: target - at0, perpetuity: valuation.benefit / r });
            }
        }
        // pc(lo) < target <= pc(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pc(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        nearest(lo, hi)
    } else {
        let max_lt = i64::from(*lts.iter().max().expect("non-empty"));
        // pc(lo) <= target < pc(hi)
        let mut lo = -max_lt;
        let mut hi = 0i64;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pc(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        nearest(hi, lo)
    };
    i32::try_from(w).map_err(|_| AafError::Infeasible { d: target - at0, perpetuity: valuation.benefit / r })
}

struct Group<'a> {
    uf: UfCode,
    sex: Option<Sex>,
    members: Vec<&'a LifetimeEntry>,
}

fn solve_groups(
    proposal: Proposal,
    groups: Vec<Group<'_>>,
    target_of: impl Fn(&Group<'_>) -> f64,
    valuation: &Valuation,
) -> AafReport {
    let mut results = Vec::new();
    let mut diagnostics = Vec::new();
    for g in groups {
        if g.members.is_empty() {
            diagnostics.push(GroupDiagnostic { uf: g.uf, sex: g.sex, issue: Issue::EmptyGroup });
            continue;
        }
        let lts: Vec<u32> = g.members.iter().map(|e| e.lt_months).collect();
        let per_capita = per_capita_with_offset(&lts, 0, valuation);
        let target = target_of(&g);
        let d = benefit_difference(target, per_capita);
        let solved = solve_offset(d, valuation).and_then(|cf| {
            let w = if d == 0.0 { 0 } else { equalizing_offset(&lts, target, valuation)? };
            Ok((cf, w))
        });
        let Ok((closed_form_w_months, w)) = solved else {
            diagnostics.push(GroupDiagnostic { uf: g.uf, sex: g.sex, issue: Issue::Infeasible });
            continue;
        };
        let clamped = lts.iter().filter(|&&lt| i64::from(lt) + i64::from(w) < 0).count();
        if clamped > 0 {
            diagnostics.push(GroupDiagnostic { uf: g.uf, sex: g.sex, issue: Issue::Clamped(clamped) });
        }
        results.push(AafResult {
            proposal,
            uf: g.uf,
            sex: g.sex,
            count: lts.len(),
            per_capita,
            target,
            d,
            w_months: w,
            z_months: w.unsigned_abs(),
            closed_form_w_months,
            factor: factor_for(w),
            new_age: new_age_for(w),
            per_capita_after: per_capita_with_offset(&lts, i64::from(w), valuation),
        });
    }
    AafReport { proposal, results, diagnostics }
}

/// Proposal 1 on resolved lifetimes: one factor per (UF, sex).
pub fn proposal1_from_lifetimes(
    entries: &[LifetimeEntry],
    ufs: &[UfCode],
    valuation: &Valuation,
    basis: LeBasis,
    target: Proposal1Target,
) -> AafReport {
    let base = aggregate_lifetimes(entries, ufs, valuation, basis);
    let mut groups = Vec::new();
    for row in base.rows_of(crate::edb::GroupKind::UfSex) {
        let (uf, sex) = (row.uf.expect("uf set"), row.sex.expect("sex set"));
        let members = entries.iter().filter(|e| e.uf == uf && e.sex == sex).collect();
        groups.push(Group { uf, sex: Some(sex), members });
    }
    let target_of = |g: &Group<'_>| match target {
        Proposal1Target::PerSex => base.sex(g.sex.expect("sex set")).per_capita,
        Proposal1Target::National => base.nation().per_capita,
    };
    solve_groups(Proposal::One, groups, target_of, valuation)
}

/// Proposal 2 on resolved lifetimes: one factor per UF, sexes pooled.
pub fn proposal2_from_lifetimes(
    entries: &[LifetimeEntry],
    ufs: &[UfCode],
    valuation: &Valuation,
    basis: LeBasis,
) -> AafReport {
    let base: EdbReport = aggregate_lifetimes(entries, ufs, valuation, basis);
    let groups = base
        .rows_of(crate::edb::GroupKind::Uf)
        .map(|row| {
            let uf = row.uf.expect("uf set");
            Group { uf, sex: None, members: entries.iter().filter(|e| e.uf == uf).collect() }
        })
        .collect();
    let national = base.nation().per_capita;
    solve_groups(Proposal::Two, groups, |_| national, valuation)
}

pub fn aaf_proposal1<'a, I>(
    records: I,
    table: &LifeTable,
    cfg: &MoneyConfig,
    opts: AafOptions,
) -> Result<AafReport, AafError>
where
    I: IntoIterator<Item = &'a BeneficiaryRecord>,
{
    let valuation = Valuation::new(cfg)?;
    let entries = assign_lifetimes(records, table, opts.basis, cfg.reference_date)?;
    Ok(proposal1_from_lifetimes(&entries, &table.ufs(), &valuation, opts.basis, opts.target))
}

pub fn aaf_proposal2<'a, I>(
    records: I,
    table: &LifeTable,
    cfg: &MoneyConfig,
    opts: AafOptions,
) -> Result<AafReport, AafError>
where
    I: IntoIterator<Item = &'a BeneficiaryRecord>,
{
    let valuation = Valuation::new(cfg)?;
    let entries = assign_lifetimes(records, table, opts.basis, cfg.reference_date)?;
    Ok(proposal2_from_lifetimes(&entries, &table.ufs(), &valuation, opts.basis))
}

/// Male birth expectancy minus the reform age.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReformGap {
    pub uf: UfCode,
    pub gap: Hundredths,
}

impl ReformGap {
    pub fn gap_years(&self) -> f64 {
        self.gap.to_f64()
    }
}

pub fn reform_gap(table: &LifeTable) -> Vec<ReformGap> {
    let reform = Hundredths::from_years(REFORM_AGE_YEARS);
    table
        .rows()
        .iter()
        .map(|row| ReformGap { uf: row.uf, gap: Hundredths(row.get(LeColumn::Birth, Cohort::Male).0 - reform.0) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annuity::annuity_pv;
    use crate::reference::load_reference_tables;
    use alloc::format;
    use alloc::string::String;
    use chrono::NaiveDate;

    fn val(b: f64) -> Valuation {
        Valuation::new(&MoneyConfig { benefit: b, ..Default::default() }).unwrap()
    }

    fn entry(i: usize, uf: u8, sex: Sex, lt: u32) -> LifetimeEntry {
        LifetimeEntry {
            id: format!("{i:05}"),
            uf: UfCode::new(uf).unwrap(),
            sex,
            birth_date: NaiveDate::from_ymd_opt(1950, 1, 1).unwrap(),
            age_months: 800,
            lt_months: lt,
        }
    }

    #[test]
    fn difference_examples() {
        assert_eq!(benefit_difference(100.0, 100.0), 0.0);
        assert_eq!(benefit_difference(100.0, 60.0), 40.0);
    }

    #[test]
    fn closed_form_offsets() {
        let v = val(10.0);
        assert_eq!(solve_offset(0.0, &v), Ok(0));
        assert_eq!(solve_offset(10.0 * annuity_pv(24, v.rate), &v), Ok(24));
        assert_eq!(solve_offset(-10.0 * annuity_pv(12, v.rate), &v), Ok(-12));
        let perp = 10.0 / v.rate.value();
        assert!(matches!(solve_offset(perp, &v), Err(AafError::Infeasible { .. })));
        assert!(matches!(solve_offset(-perp * 1.5, &v), Err(AafError::Infeasible { .. })));
    }

    #[test]
    fn closed_form_is_monotone_in_abs_d() {
        let v = val(1.0);
        let mut last = 0;
        for k in 0..200 {
            let w = solve_offset(f64::from(k) * 0.9, &v).unwrap();
            assert!(w >= last);
            last = w;
        }
    }

    #[test]
    fn factor_and_age_identities() {
        assert_eq!(new_age_for(-12), 64.0);
        assert_eq!(factor_for(0), 1.0);
        assert_eq!(new_age_for(0), 65.0);
        assert!((factor_for(-12) * 65.0 - 64.0).abs() < 1e-12);
    }

    #[test]
    fn two_uf_equalization() {
        let v = val(1.0);
        let mut entries: Vec<_> = (0..10).map(|i| entry(i, 1, Sex::Male, 120)).collect();
        entries.extend((10..20).map(|i| entry(i, 2, Sex::Male, 60)));
        let ufs = [UfCode::new(1).unwrap(), UfCode::new(2).unwrap()];
        let rep = proposal2_from_lifetimes(&entries, &ufs, &v, LeBasis::AtBirth);
        assert_eq!(rep.results.len(), 2);
        // Oracle: national target is the mean of the two uniform groups.
        let target = (annuity_pv(120, v.rate) + annuity_pv(60, v.rate)) / 2.0;
        let long = &rep.results[0];
        let short = &rep.results[1];
        assert!(long.w_months < 0 && short.w_months > 0);
        for res in [long, short] {
            let lt = if res.uf.number() == 1 { 120 } else { 60 };
            let after = annuity_pv((lt + res.w_months) as u32, v.rate);
            assert!((after - target).abs() <= 1.0, "{res:?}");
            assert!((res.per_capita_after - after).abs() < 1e-12);
            assert!((res.target - target).abs() < 1e-12);
        }
        // Months removed at the tail are discounted, so the closed form falls short.
        assert!(long.closed_form_w_months > long.w_months);
    }

    #[test]
    fn neutral_population() {
        let v = val(3.0);
        let lts = [10, 50, 200, 0, 90];
        let mut entries = Vec::new();
        let mut i = 0;
        for uf in 1..=3u8 {
            for sex in Sex::BOTH {
                for &lt in &lts {
                    entries.push(entry(i, uf, sex, lt));
                    i += 1;
                }
            }
        }
        let ufs: Vec<_> = (1..=3).map(|u| UfCode::new(u).unwrap()).collect();
        for rep in [
            proposal1_from_lifetimes(&entries, &ufs, &v, LeBasis::AtBirth, Proposal1Target::PerSex),
            proposal1_from_lifetimes(&entries, &ufs, &v, LeBasis::AtBirth, Proposal1Target::National),
            proposal2_from_lifetimes(&entries, &ufs, &v, LeBasis::AtBirth),
        ] {
            assert!(!rep.results.is_empty());
            for r in &rep.results {
                assert_eq!(r.w_months, 0);
                assert_eq!(r.factor, 1.0);
                assert_eq!(r.new_age, 65.0);
            }
        }
    }

    #[test]
    fn empty_groups_skipped() {
        let v = val(1.0);
        let entries = [entry(0, 1, Sex::Female, 100)];
        let ufs = [UfCode::new(1).unwrap(), UfCode::new(2).unwrap()];
        let rep = proposal1_from_lifetimes(&entries, &ufs, &v, LeBasis::AtBirth, Proposal1Target::PerSex);
        assert_eq!(rep.results.len(), 1);
        assert_eq!(rep.diagnostics.iter().filter(|d| d.issue == Issue::EmptyGroup).count(), 3);
    }

    #[test]
    fn clamping_is_reported() {
        let v = val(1.0);
        let mut entries: Vec<_> = (0..5).map(|i| entry(i, 1, Sex::Male, 0)).collect();
        entries.extend((5..10).map(|i| entry(i, 1, Sex::Male, 400)));
        entries.extend((10..20).map(|i| entry(i, 2, Sex::Male, 20)));
        let ufs = [UfCode::new(1).unwrap(), UfCode::new(2).unwrap()];
        let rep = proposal2_from_lifetimes(&entries, &ufs, &v, LeBasis::AtBirth);
        assert!(rep.diagnostics.iter().any(|d| matches!(d.issue, Issue::Clamped(5))));
    }

    #[test]
    fn record_level_wrappers() {
        let (table, _) = load_reference_tables().unwrap();
        let rec = |id: &str, uf: &str, sex| BeneficiaryRecord {
            id: String::from(id),
            uf: UfCode::from_abbrev(uf).unwrap(),
            sex,
            birth_date: NaiveDate::from_ymd_opt(1950, 6, 1).unwrap(),
            grant_date: NaiveDate::from_ymd_opt(2018, 3, 1).unwrap(),
            kind: crate::types::BenefitKind::Elderly,
            survivor: false,
        };
        let recs = [rec("a", "SP", Sex::Female), rec("b", "SP", Sex::Male)];
        let cfg = MoneyConfig::default();
        let p2 = aaf_proposal2(&recs, &table, &cfg, AafOptions::default()).unwrap();
        assert_eq!(p2.results.len(), 1);
        assert_eq!(p2.results[0].w_months, 0);
        let p1 = aaf_proposal1(&recs, &table, &cfg, AafOptions::default()).unwrap();
        assert!(p1.results.iter().all(|r| r.w_months == 0));
        let p1n =
            aaf_proposal1(&recs, &table, &cfg, AafOptions { target: Proposal1Target::National, ..Default::default() })
                .unwrap();
        let male = p1n.results.iter().find(|r| r.sex == Some(Sex::Male)).unwrap();
        let female = p1n.results.iter().find(|r| r.sex == Some(Sex::Female)).unwrap();
        assert!(male.w_months > 0 && female.w_months < 0);
    }

    #[test]
    fn reform_gap_examples() {
        let (table, _) = load_reference_tables().unwrap();
        let gaps = reform_gap(&table);
        assert_eq!(gaps.len(), 27);
        let get = |a| gaps.iter().find(|g| g.uf == UfCode::from_abbrev(a).unwrap()).unwrap().gap;
        assert_eq!(get("AL"), Hundredths(-312));
        assert_eq!(get("SC"), Hundredths(433));
        assert_eq!(gaps.iter().map(|g| g.gap).min(), Some(Hundredths(-312)));
        assert_eq!(gaps.iter().map(|g| g.gap).max(), Some(Hundredths(433)));
        let seventy = Hundredths::from_years(70).0 - Hundredths::from_years(REFORM_AGE_YEARS).0;
        assert_eq!(seventy, 0);
    }
}
