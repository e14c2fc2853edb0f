//! Actuarial and statistical engine for a means-tested micro-pension programme.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! - [`types`] and [`reference`]: federal units, sexes, beneficiary records and
//!   the bundled life-expectancy table.
//! - [`validate`]: record screening with survivor flagging.
//! - [`annuity`]: monthly rates, annuity-immediate present values and term inversion.
//! - [`edb`]: remaining lifetimes and expected discounted benefit aggregation.
//! - [`aaf`]: benefit-age adjusting factors and the age-70 reform gap.
//! - [`stats`]: OLS with response transforms, information criteria and the
//!   diagnostic test battery.
//! - [`cluster`]: Euclidean distances, single linkage, k-means and partition
//!   comparison.
//!
//! File formats, the CLI and report emission live in the `pension-toolkit` crate.
#![cfg_attr(not(test), no_std)]
// Guards such as `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod aaf;
pub mod annuity;
pub mod cluster;
pub mod edb;
pub mod reference;
pub mod stats;
pub mod types;
pub mod validate;

pub use aaf::{AafError, AafReport, AafResult, ReformGap};
pub use annuity::{AnnuityError, MonthlyRate, RoundingPolicy};
pub use edb::{EdbError, EdbReport, LeBasis, RemainingLifetime};
pub use reference::{Cohort, LeColumn, LifeTable, TableError, UfLifeRow};
pub use types::{BeneficiaryRecord, BenefitKind, EconomicRow, Hundredths, MoneyConfig, Sex, UfCode};
pub use validate::{validate_records, SampleWindow, ValidationReport};
