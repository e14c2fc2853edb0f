use pension_core::annuity::{annuity_pv, invert_annuity, monthly_rate, solve_term, MonthlyRate, RoundingPolicy};
use proptest::prelude::*;

fn brute(n: u32, r: f64) -> f64 {
    let v = 1.0 / (1.0 + r);
    let mut acc = 0.0;
    let mut f = 1.0;
    for _ in 0..n {
        f *= v;
        acc += f;
    }
    acc
}

proptest! {
    #[test]
    fn closed_form_matches_sum(n in 0u32..=1200, r in 0.0f64..=0.02) {
        let rate = MonthlyRate::new(r).unwrap();
        prop_assert!((annuity_pv(n, rate) - brute(n, r)).abs() <= 1e-9 * f64::from(n.max(1)));
    }

    #[test]
    fn inversion_round_trip(n in 0u32..=1200, r in 1e-6f64..=0.02, b in 0.1f64..5000.0) {
        let rate = MonthlyRate::new(r).unwrap();
        let target = b * annuity_pv(n, rate);
        prop_assert_eq!(invert_annuity(target, b, rate, RoundingPolicy::Nearest).unwrap(), n);
    }

    #[test]
    fn floor_and_ceil_bracket(target in 0.0f64..150.0, r in 1e-4f64..=0.02) {
        let rate = MonthlyRate::new(r).unwrap();
        prop_assume!(target < 1.0 / r);
        let lo = invert_annuity(target, 1.0, rate, RoundingPolicy::Floor).unwrap();
        let hi = invert_annuity(target, 1.0, rate, RoundingPolicy::Ceil).unwrap();
        prop_assert!(annuity_pv(lo, rate) <= target + 1e-9);
        prop_assert!(annuity_pv(hi, rate) >= target - 1e-9);
        prop_assert!(hi - lo <= 1);
        let z = solve_term(target, 1.0, rate).unwrap();
        prop_assert!(f64::from(lo) <= z + 1e-9 && z <= f64::from(hi) + 1e-9);
    }

    #[test]
    fn pv_increases_with_term_and_falls_with_rate(n in 1u32..1200, r in 1e-5f64..0.02) {
        let rate = MonthlyRate::new(r).unwrap();
        prop_assert!(annuity_pv(n + 1, rate) > annuity_pv(n, rate));
        prop_assert!(annuity_pv(n, MonthlyRate::new(r * 1.1).unwrap()) < annuity_pv(n, rate));
    }
}

#[test]
fn monthly_rate_compounds_to_annual() {
    for annual in [0.0, 0.01, 0.06, 0.12, 0.5] {
        let m = monthly_rate(annual).unwrap().value();
        assert!(((1.0 + m).powi(12) - 1.0 - annual).abs() < 1e-13);
    }
}
