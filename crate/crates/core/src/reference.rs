//! Bundled per-UF life-expectancy table.
//!
//! The "after 60" and "after 65" columns hold the expected *age at death* of a
//! person who has reached that age, not the residual years. Remaining-lifetime
//! math subtracts the current age.

use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::types::{Hundredths, Sex, UfCode};

const BUNDLE: &str = include_str!("../data/uf_life_expectancy.csv");

const BUNDLE_SHA256: [u8; 32] = [
    0xf4, 0xd6, 0x5f, 0x4f, 0xd9, 0x17, 0xba, 0x29, 0x33, 0xee, 0x09, 0x15, 0x46, 0x65, 0xa7, 0x34, 0xc2, 0x62, 0xbe,
    0xa9, 0xf1, 0x53, 0xe7, 0x2d, 0x4f, 0x96, 0x5d, 0x76, 0x8c, 0xd4, 0x02, 0x18,
];

const HEADER: &str = "num,abbrev,name,birth_total,birth_male,birth_female,after60_total,after60_male,after60_female,after65_total,after65_male,after65_female";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("bundled table checksum mismatch")]
    Checksum,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: &'static str },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("{uf}: {reason}")]
    Invariant { uf: UfCode, reason: &'static str },
    #[error("duplicate row for {0}")]
    Duplicate(UfCode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeColumn {
    Birth,
    After60,
    After65,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cohort {
    Total,
    Male,
    Female,
}

impl From<Sex> for Cohort {
    fn from(s: Sex) -> Self {
        match s {
            Sex::Male => Cohort::Male,
            Sex::Female => Cohort::Female,
        }
    }
}

impl Cohort {
    pub const ALL: [Cohort; 3] = [Cohort::Total, Cohort::Male, Cohort::Female];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expectancies {
    pub total: Hundredths,
    pub male: Hundredths,
    pub female: Hundredths,
}

impl Expectancies {
    pub fn get(&self, cohort: Cohort) -> Hundredths {
        match cohort {
            Cohort::Total => self.total,
            Cohort::Male => self.male,
            Cohort::Female => self.female,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UfLifeRow {
    pub uf: UfCode,
    pub birth: Expectancies,
    pub after60: Expectancies,
    pub after65: Expectancies,
}

impl UfLifeRow {
    pub fn get(&self, column: LeColumn, cohort: Cohort) -> Hundredths {
        match column {
            LeColumn::Birth => self.birth.get(cohort),
            LeColumn::After60 => self.after60.get(cohort),
            LeColumn::After65 => self.after65.get(cohort),
        }
    }

    fn check(&self) -> Result<(), TableError> {
        let invariant = |reason| TableError::Invariant { uf: self.uf, reason };
        for cohort in Cohort::ALL {
            for col in [LeColumn::Birth, LeColumn::After60, LeColumn::After65] {
                let v = self.get(col, cohort).0;
                if !(5000 < v && v < 10000) {
                    return Err(invariant("value outside (50, 100)"));
                }
            }
            let (b, a60, a65) = (
                self.get(LeColumn::Birth, cohort),
                self.get(LeColumn::After60, cohort),
                self.get(LeColumn::After65, cohort),
            );
            if !(a65 >= a60 && a60 >= b) {
                return Err(invariant("after65 >= after60 >= birth violated"));
            }
        }
        if self.birth.female < self.birth.male {
            return Err(invariant("female birth expectancy below male"));
        }
        Ok(())
    }
}

/// Life expectancies indexed by federal unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LifeTable {
    rows: Vec<UfLifeRow>,
}

impl LifeTable {
    /// Builds a table from rows, checking per-row invariants. The table may
    /// cover a subset of the federal units.
    pub fn from_rows(mut rows: Vec<UfLifeRow>) -> Result<Self, TableError> {
        rows.sort_by_key(|r| r.uf);
        for w in rows.windows(2) {
            if w[0].uf == w[1].uf {
                return Err(TableError::Duplicate(w[0].uf));
            }
        }
        for r in &rows {
            r.check()?;
        }
        Ok(Self { rows })
    }

    /// Parses the comma-separated table layout used by the bundle.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(TableError::Malformed { line: 1, reason: "missing or unexpected header" }),
        }
        let mut rows = Vec::with_capacity(UfCode::COUNT);
        for (i, line) in lines {
            let malformed = |reason| TableError::Malformed { line: i + 1, reason };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 12 {
                return Err(malformed("expected 12 fields"));
            }
            let uf = fields[0].parse::<u8>().ok().and_then(UfCode::new).ok_or(malformed("bad UF number"))?;
            if uf.abbrev() != fields[1] || uf.name() != fields[2] {
                return Err(malformed("UF code, abbreviation and name disagree"));
            }
            let mut vals = [Hundredths(0); 9];
            for (slot, f) in vals.iter_mut().zip(&fields[3..]) {
                *slot = f.parse().map_err(|_| malformed("bad decimal"))?;
            }
            let triple = |k: usize| Expectancies { total: vals[k], male: vals[k + 1], female: vals[k + 2] };
            rows.push(UfLifeRow { uf, birth: triple(0), after60: triple(3), after65: triple(6) });
        }
        Self::from_rows(rows)
    }

    pub fn row(&self, uf: UfCode) -> Option<&UfLifeRow> {
        self.rows.binary_search_by_key(&uf, |r| r.uf).ok().map(|i| &self.rows[i])
    }

    pub fn lookup(&self, uf: UfCode, column: LeColumn, cohort: Cohort) -> Option<Hundredths> {
        self.row(uf).map(|r| r.get(column, cohort))
    }

    /// Lookup in years.
    pub fn years(&self, uf: UfCode, column: LeColumn, cohort: Cohort) -> Option<f64> {
        self.lookup(uf, column, cohort).map(Hundredths::to_f64)
    }

    pub fn rows(&self) -> &[UfLifeRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn ufs(&self) -> Vec<UfCode> {
        self.rows.iter().map(|r| r.uf).collect()
    }
}

/// Loads the bundled 27-row reference table after verifying its checksum.
pub fn load_reference_tables() -> Result<(LifeTable, Vec<UfCode>), TableError> {
    load_bundle(BUNDLE.as_bytes())
}

fn load_bundle(bytes: &[u8]) -> Result<(LifeTable, Vec<UfCode>), TableError> {
    if Sha256::digest(bytes).as_slice() != BUNDLE_SHA256 {
        return Err(TableError::Checksum);
    }
    let text = core::str::from_utf8(bytes).map_err(|_| TableError::Checksum)?;
    let table = LifeTable::parse(text)?;
    if table.len() != UfCode::COUNT {
        return Err(TableError::RowCount { expected: UfCode::COUNT, found: table.len() });
    }
    let ufs = table.ufs();
    Ok((table, ufs))
}

/// Raw bundle text, exposed so callers can re-emit it verbatim.
pub fn bundle_text() -> &'static str {
    BUNDLE
}
