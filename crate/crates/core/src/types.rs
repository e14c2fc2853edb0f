//! Domain types shared across the engine.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use chrono::{Datelike, NaiveDate};

const UF_TABLE: [(&str, &str); 27] = [
    ("AL", "Alagoas"),
    ("AM", "Amazonas"),
    ("BA", "Bahia"),
    ("CE", "Ceará"),
    ("MS", "Mato Grosso do Sul"),
    ("ES", "Espírito Santo"),
    ("GO", "Goiás"),
    ("MA", "Maranhão"),
    ("MT", "Mato Grosso"),
    ("MG", "Minas Gerais"),
    ("PA", "Pará"),
    ("PB", "Paraíba"),
    ("PR", "Paraná"),
    ("PE", "Pernambuco"),
    ("PI", "Piauí"),
    ("RJ", "Rio de Janeiro"),
    ("RN", "Rio Grande do Norte"),
    ("RS", "Rio Grande do Sul"),
    ("SC", "Santa Catarina"),
    ("SP", "São Paulo"),
    ("SE", "Sergipe"),
    ("DF", "Distrito Federal"),
    ("AC", "Acre"),
    ("AP", "Amapá"),
    ("RO", "Rondônia"),
    ("RR", "Roraima"),
    ("TO", "Tocantins"),
];

/// One of the 27 Brazilian federal units, numbered as in the reference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UfCode(u8);

impl UfCode {
    pub const COUNT: usize = 27;

    pub fn new(number: u8) -> Option<Self> {
        (1..=27).contains(&number).then_some(Self(number))
    }

    pub fn from_abbrev(abbrev: &str) -> Option<Self> {
        UF_TABLE.iter().position(|(a, _)| a.eq_ignore_ascii_case(abbrev)).map(|i| Self(i as u8 + 1))
    }

    pub fn from_name(name: &str) -> Option<Self> {
        UF_TABLE.iter().position(|(_, n)| *n == name).map(|i| Self(i as u8 + 1))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// Zero-based position, handy for dense per-UF arrays.
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub fn abbrev(self) -> &'static str {
        UF_TABLE[self.index()].0
    }

    pub fn name(self) -> &'static str {
        UF_TABLE[self.index()].1
    }

    pub fn all() -> impl Iterator<Item = UfCode> + Clone {
        (1..=27u8).map(UfCode)
    }
}

impl fmt::Display for UfCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbrev())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sex {
    Male,
    Female,
}

impl Sex {
    pub const BOTH: [Sex; 2] = [Sex::Male, Sex::Female];

    /// 1 for male, 2 for female.
    pub fn index(self) -> u8 {
        match self {
            Sex::Male => 1,
            Sex::Female => 2,
        }
    }

    pub fn from_index(j: u8) -> Option<Self> {
        match j {
            1 => Some(Sex::Male),
            2 => Some(Sex::Female),
            _ => None,
        }
    }

    pub fn code(self) -> char {
        match self {
            Sex::Male => 'M',
            Sex::Female => 'F',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenefitKind {
    Elderly,
    Disabled,
}

/// Fixed-point decimal with two fractional digits, used for tabulated years.
///
/// Keeping the table in hundredths makes lookups reproduce the printed values
/// exactly and keeps differences such as `66.88 - 70` free of rounding noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hundredths(pub i32);

impl Hundredths {
    pub fn from_years(whole: i32) -> Self {
        Self(whole * 100)
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / 100.0
    }
}

impl FromStr for Hundredths {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() || frac_part.len() > 2 {
            return Err(());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        let whole: i32 = int_part.parse().map_err(|_| ())?;
        let mut frac: i32 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| ())? };
        if frac_part.len() == 1 {
            frac *= 10;
        }
        let v = whole.checked_mul(100).and_then(|w| w.checked_add(frac)).ok_or(())?;
        Ok(Self(if neg { -v } else { v }))
    }
}

impl fmt::Display for Hundredths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", a / 100, a % 100)
    }
}

/// One person from the beneficiary microdata sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BeneficiaryRecord {
    pub id: String,
    pub uf: UfCode,
    pub sex: Sex,
    pub birth_date: NaiveDate,
    pub grant_date: NaiveDate,
    pub kind: BenefitKind,
    pub survivor: bool,
}

/// Regional indicators for one federal unit.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomicRow {
    pub uf: UfCode,
    /// X1
    pub hdi: f64,
    /// X2, currency per month
    pub income_pc: f64,
    /// X3, years
    pub le_birth: f64,
    /// X4, people per km²
    pub density: f64,
    pub population: u64,
    pub bnf_total: u64,
    pub bnf_elderly: u64,
    pub bnf_disabled: u64,
}

/// Monetary assumptions for present-value work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoneyConfig {
    /// Monthly benefit `b`.
    pub benefit: f64,
    pub annual_rate: f64,
    /// BRL per EUR.
    pub exchange_rate: f64,
    pub reference_date: NaiveDate,
}

impl Default for MoneyConfig {
    fn default() -> Self {
        Self {
            benefit: 1.0,
            annual_rate: 0.06,
            exchange_rate: 4.35,
            reference_date: NaiveDate::from_ymd_opt(2018, 4, 6).expect("valid date"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("monthly benefit must be positive, got {0}")]
    Benefit(f64),
    #[error("annual rate must exceed -1, got {0}")]
    Rate(f64),
    #[error("exchange rate must be positive, got {0}")]
    ExchangeRate(f64),
}

impl MoneyConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        if !(self.benefit > 0.0 && self.benefit.is_finite()) {
            return Err(ConfigError::Benefit(self.benefit));
        }
        if !(self.annual_rate > -1.0 && self.annual_rate.is_finite()) {
            return Err(ConfigError::Rate(self.annual_rate));
        }
        if !(self.exchange_rate > 0.0 && self.exchange_rate.is_finite()) {
            return Err(ConfigError::ExchangeRate(self.exchange_rate));
        }
        Ok(())
    }
}

/// Completed calendar months between `birth` and `at`.
///
/// Counts the month difference, then drops one month if the day of month has
/// not yet been reached. Returns `None` when `at` precedes `birth`.
pub fn age_in_months(birth: NaiveDate, at: NaiveDate) -> Option<u32> {
    if at < birth {
        return None;
    }
    let mut months = (at.year() - birth.year()) * 12 + at.month() as i32 - birth.month() as i32;
    if at.day() < birth.day() {
        months -= 1;
    }
    u32::try_from(months).ok()
}
