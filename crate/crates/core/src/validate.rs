//! Record screening for the beneficiary sample.
//!
//! Survivors are flagged rather than removed so that both the filtered and the
//! unfiltered counts can be reported.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::NaiveDate;

use crate::types::{BeneficiaryRecord, BenefitKind};

/// Inclusive range of grant dates admitted into the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Default for SampleWindow {
    fn default() -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(2018, 1, 2).expect("valid date"),
            end: NaiveDate::from_ymd_opt(2018, 4, 6).expect("valid date"),
        }
    }
}

impl SampleWindow {
    pub fn contains(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    DateOrder,
    OutsideWindow,
    DuplicateId,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::DateOrder => "date order",
            RejectReason::OutsideWindow => "grant date outside sample window",
            RejectReason::DuplicateId => "duplicate id",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub index: usize,
    pub id: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KindCounts {
    pub elderly: usize,
    pub disabled: usize,
}

impl KindCounts {
    fn bump(&mut self, kind: BenefitKind) {
        match kind {
            BenefitKind::Elderly => self.elderly += 1,
            BenefitKind::Disabled => self.disabled += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.elderly + self.disabled
    }
}

/// Outcome of [`validate_records`]. All index lists refer to positions in
/// the input slice and are ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub total: usize,
    /// Records passing every check, survivors included.
    pub accepted: Vec<usize>,
    pub rejected: Vec<Rejection>,
    /// Accepted records flagged as survivor entitlements.
    pub excluded_survivors: Vec<usize>,
    /// Accepted, non-survivor records.
    pub analysis: Vec<usize>,
    pub accepted_by_kind: KindCounts,
    pub analysis_by_kind: KindCounts,
}

impl ValidationReport {
    /// Elderly, non-survivor records: the set EDB and AAF work on.
    pub fn elderly_analysis_set<'a>(&self, records: &'a [BeneficiaryRecord]) -> Vec<&'a BeneficiaryRecord> {
        self.analysis.iter().map(|&i| &records[i]).filter(|r| r.kind == BenefitKind::Elderly).collect()
    }
}

pub fn validate_records(records: &[BeneficiaryRecord], window: &SampleWindow) -> ValidationReport {
    let mut report = ValidationReport { total: records.len(), ..Default::default() };
    let mut ids = BTreeSet::new();
    for (index, rec) in records.iter().enumerate() {
        let reason = if rec.grant_date < rec.birth_date {
            Some(RejectReason::DateOrder)
        } else if !window.contains(rec.grant_date) {
            Some(RejectReason::OutsideWindow)
        } else if !ids.insert(rec.id.as_str()) {
            Some(RejectReason::DuplicateId)
        } else {
            None
        };
        if let Some(reason) = reason {
            report.rejected.push(Rejection { index, id: rec.id.clone(), reason });
            continue;
        }
        report.accepted.push(index);
        report.accepted_by_kind.bump(rec.kind);
        if rec.survivor {
            report.excluded_survivors.push(index);
        } else {
            report.analysis.push(index);
            report.analysis_by_kind.bump(rec.kind);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Sex, UfCode};
    use alloc::format;

    fn rec(i: usize, survivor: bool) -> BeneficiaryRecord {
        BeneficiaryRecord {
            id: format!("p{i}"),
            uf: UfCode::new((i % 27) as u8 + 1).unwrap(),
            sex: if i.is_multiple_of(2) { Sex::Male } else { Sex::Female },
            birth_date: NaiveDate::from_ymd_opt(1950, 1 + (i % 12) as u32, 1).unwrap(),
            grant_date: NaiveDate::from_ymd_opt(2018, 2, 1 + (i % 28) as u32).unwrap(),
            kind: if i.is_multiple_of(3) { BenefitKind::Disabled } else { BenefitKind::Elderly },
            survivor,
        }
    }

    #[test]
    fn empty_input() {
        let r = validate_records(&[], &SampleWindow::default());
        assert_eq!(r.total, 0);
        assert!(r.accepted.is_empty() && r.rejected.is_empty());
    }

    #[test]
    fn date_order_rejected() {
        let mut r0 = rec(0, false);
        r0.grant_date = NaiveDate::from_ymd_opt(1949, 1, 1).unwrap();
        let r = validate_records(&[r0], &SampleWindow::default());
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.rejected[0].reason, RejectReason::DateOrder);
        assert_eq!(r.rejected[0].reason.to_string(), "date order");
    }

    #[test]
    fn survivors_are_flagged_not_dropped() {
        let records: Vec<_> = (0..100).map(|i| rec(i, i % 14 == 5)).collect();
        assert_eq!(records.iter().filter(|r| r.survivor).count(), 7);
        let r = validate_records(&records, &SampleWindow::default());
        assert_eq!(r.accepted.len(), 100);
        assert_eq!(r.analysis.len(), 93);
        assert_eq!(r.excluded_survivors.len(), 7);
        assert_eq!(r.accepted_by_kind.total(), 100);
        assert_eq!(r.analysis_by_kind.total(), 93);
    }

    #[test]
    fn window_and_duplicates() {
        let mut late = rec(1, false);
        late.grant_date = NaiveDate::from_ymd_opt(2018, 4, 7).unwrap();
        let dup = rec(2, false);
        let records = [rec(2, false), late, dup];
        let r = validate_records(&records, &SampleWindow::default());
        let reasons: Vec<_> = r.rejected.iter().map(|x| (x.index, x.reason)).collect();
        assert_eq!(reasons, [(1, RejectReason::OutsideWindow), (2, RejectReason::DuplicateId)]);
    }

    #[test]
    fn deterministic() {
        let records: Vec<_> = (0..50).map(|i| rec(i, i % 9 == 0)).collect();
        let w = SampleWindow::default();
        assert_eq!(validate_records(&records, &w), validate_records(&records, &w));
    }
}
