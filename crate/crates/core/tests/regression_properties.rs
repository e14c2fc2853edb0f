use pension_core::stats::linalg::from_columns;
use pension_core::stats::{fit_design, turning_points, Design, Regressor, Term, Transform};
use proptest::prelude::*;

fn design(cols: &[Vec<f64>]) -> Design {
    let n = cols[0].len();
    let mut all = vec![vec![1.0; n]];
    all.extend_from_slice(cols);
    let names = (0..all.len()).map(|j| format!("c{j}")).collect();
    Design::new(names, from_columns(&all), true)
}

fn data() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (12usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-50.0f64..50.0, n),
        )
    })
}

proptest! {
    #[test]
    fn residuals_orthogonal_to_design((x1, x2, y) in data()) {
        let d = design(&[x1, x2]);
        let x = d.matrix.clone();
        let Ok(m) = fit_design(d, y.clone(), Transform::None) else { return Ok(()) };
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..x.ncols() {
            let dot: f64 = (0..x.nrows()).map(|i| x[(i, j)] * m.residuals[i]).sum();
            prop_assert!(dot.abs() <= 1e-8 * ynorm.max(1.0));
        }
    }

    #[test]
    fn adding_a_regressor_never_lowers_r2((x1, x2, y) in data()) {
        let small = fit_design(design(std::slice::from_ref(&x1)), y.clone(), Transform::None);
        let big = fit_design(design(&[x1, x2]), y, Transform::None);
        if let (Ok(s), Ok(b)) = (small, big) {
            prop_assert!(b.r2 >= s.r2 - 1e-12);
            prop_assert!(b.adj_r2 <= b.r2 + 1e-15);
            prop_assert!((0.0..=1.0).contains(&b.r2));
        }
    }

    #[test]
    fn vertex_invariant_to_response_scale((x1, _x2, y) in data(), c in 0.01f64..100.0) {
        let sq: Vec<f64> = x1.iter().map(|v| v * v).collect();
        let a = fit_design(design(&[x1.clone(), sq.clone()]), y.clone(), Transform::None);
        let b = fit_design(design(&[x1, sq]), y.iter().map(|v| v * c).collect(), Transform::None);
        if let (Ok(a), Ok(b)) = (a, b) {
            let tp = |m: &pension_core::stats::FittedModel| {
                let e = m.estimates();
                turning_points(&[(Term::linear(Regressor::Income), e[1]), (Term::quadratic(Regressor::Income), e[2])])[0].vertex()
            };
            if let (Some(va), Some(vb)) = (tp(&a), tp(&b)) {
                prop_assert!((va - vb).abs() <= 1e-6 * va.abs().max(1.0));
            }
        }
    }
}
