use chrono::NaiveDate;
use pension_core::aaf::{aaf_proposal1, aaf_proposal2, reform_gap, AafOptions, Proposal1Target};
use pension_core::edb::{edb_aggregate, LeBasis};
use pension_core::reference::load_reference_tables;
use pension_core::types::{BeneficiaryRecord, BenefitKind, MoneyConfig, Sex, UfCode};
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

fn population(rng: &mut StdRng) -> Vec<BeneficiaryRecord> {
    let n_ufs = rng.random_range(3..=27);
    let ufs: Vec<UfCode> = sample(rng, 27, n_ufs).into_iter().map(|i| UfCode::new(i as u8 + 1).unwrap()).collect();
    let n = rng.random_range(10..=2_000);
    let reference = NaiveDate::from_ymd_opt(2018, 4, 6).unwrap();
    (0..n)
        .map(|i| {
            let age_days = rng.random_range(65 * 365 + 20..85 * 365);
            BeneficiaryRecord {
                id: format!("P{i:06}"),
                uf: ufs[rng.random_range(0..ufs.len())],
                sex: if rng.random_bool(0.5) { Sex::Male } else { Sex::Female },
                birth_date: reference - chrono::Duration::days(age_days),
                grant_date: reference,
                kind: BenefitKind::Elderly,
                survivor: false,
            }
        })
        .collect()
}

#[test]
fn offsets_equalize_synthetic_populations() {
    let (table, _) = load_reference_tables().unwrap();
    let mut rng = StdRng::seed_from_u64(2024);
    for round in 0..12 {
        let records = population(&mut rng);
        let cfg = MoneyConfig { benefit: rng.random_range(50.0..1000.0), ..MoneyConfig::default() };
        let basis = if round % 2 == 0 { LeBasis::At65 } else { LeBasis::AtBirth };
        let opts = AafOptions { basis, target: Proposal1Target::PerSex };
        let edb = edb_aggregate(&records, &table, &cfg, basis).unwrap();
        let p2 = aaf_proposal2(&records, &table, &cfg, opts).unwrap();
        for res in &p2.results {
            assert!((res.target - edb.nation().per_capita).abs() <= 1e-9 * res.target.max(1.0));
            assert!((res.per_capita_after - res.target).abs() <= cfg.benefit, "{res:?}");
        }
        let p1 = aaf_proposal1(&records, &table, &cfg, opts).unwrap();
        for res in &p1.results {
            assert!((res.per_capita_after - res.target).abs() <= cfg.benefit, "{res:?}");
            assert!(if res.d > 0.0 { res.w_months >= 0 } else { res.w_months <= 0 });
        }
    }
}

#[test]
fn uniform_population_is_neutral() {
    let (table, _) = load_reference_tables().unwrap();
    // One UF's male table row copied everywhere is impossible, so use one UF.
    let uf = UfCode::from_abbrev("BA").unwrap();
    let birth = NaiveDate::from_ymd_opt(1950, 3, 1).unwrap();
    let records: Vec<_> = (0..40)
        .map(|i| BeneficiaryRecord {
            id: format!("{i}"),
            uf,
            sex: Sex::Female,
            birth_date: birth,
            grant_date: birth,
            kind: BenefitKind::Elderly,
            survivor: false,
        })
        .collect();
    let cfg = MoneyConfig::default();
    for proposal in [aaf_proposal1, aaf_proposal2] {
        let rep = proposal(&records, &table, &cfg, AafOptions::default()).unwrap();
        for r in &rep.results {
            assert_eq!(r.w_months, 0);
            assert_eq!(r.factor, 1.0);
            assert_eq!(r.new_age, 65.0);
        }
    }
}

#[test]
fn reform_gap_endpoints() {
    let (table, _) = load_reference_tables().unwrap();
    let gaps = reform_gap(&table);
    let min = gaps.iter().min_by_key(|g| g.gap).unwrap();
    let max = gaps.iter().max_by_key(|g| g.gap).unwrap();
    assert_eq!((min.uf.abbrev(), min.gap.0), ("AL", -312));
    assert_eq!((max.uf.abbrev(), max.gap.0), ("SC", 433));
}
