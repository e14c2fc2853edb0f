//! Least squares through a column-equilibrated Householder QR.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::StatsError;

/// Relative size below which a pivot of the equilibrated `R` counts as zero.
const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// Diagonal of the hat matrix.
    pub leverage: Vec<f64>,
    /// `(X'X)^{-1}`.
    pub xtx_inv: DMatrix<f64>,
}

pub fn least_squares(x: &DMatrix<f64>, y: &[f64]) -> Result<LeastSquares, StatsError> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(StatsError::Dimension { expected: n, found: y.len() });
    }
    if k == 0 || n < k {
        return Err(StatsError::Singular);
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let scale: Vec<f64> = (0..k)
        .map(|j| {
            let norm = x.column(j).norm();
            if norm > 0.0 {
                1.0 / norm
            } else {
                0.0
            }
        })
        .collect();
    if scale.contains(&0.0) {
        return Err(StatsError::Singular);
    }
    let mut xs = x.clone();
    for (j, s) in scale.iter().enumerate() {
        xs.column_mut(j).scale_mut(*s);
    }
    let qr = xs.qr();
    let q = qr.q();
    let r = qr.r();
    if (0..k).any(|j| r[(j, j)].abs() < RANK_TOL) {
        return Err(StatsError::Singular);
    }
    let yv = DVector::from_column_slice(y);
    let qty = q.tr_mul(&yv);
    let beta_s = r.solve_upper_triangular(&qty).ok_or(StatsError::Singular)?;
    let coefficients: Vec<f64> = beta_s.iter().zip(&scale).map(|(b, s)| b * s).collect();
    let fitted_v = x * DVector::from_column_slice(&coefficients);
    let fitted: Vec<f64> = fitted_v.iter().copied().collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss = residuals.iter().map(|e| e * e).sum();
    let leverage = (0..n).map(|i| q.row(i).norm_squared()).collect();
    let r_inv = r.solve_upper_triangular(&DMatrix::identity(k, k)).ok_or(StatsError::Singular)?;
    let mut xtx_inv = &r_inv * r_inv.transpose();
    for i in 0..k {
        for j in 0..k {
            xtx_inv[(i, j)] *= scale[i] * scale[j];
        }
    }
    Ok(LeastSquares { coefficients, fitted, residuals, rss, leverage, xtx_inv })
}

/// Builds an `n x k` matrix from column vectors.
pub fn from_columns(columns: &[Vec<f64>]) -> DMatrix<f64> {
    let n = columns.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sum of squared deviations from the mean.
pub fn centered_ss(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exact_line() {
        let x = from_columns(&[vec![1.0; 5], vec![0.0, 1.0, 2.0, 3.0, 4.0]]);
        let y = [1.0, 3.0, 5.0, 7.0, 9.0];
        let ls = least_squares(&x, &y).unwrap();
        assert!((ls.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((ls.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(ls.rss < 1e-20);
        let lev_sum: f64 = ls.leverage.iter().sum();
        assert!((lev_sum - 2.0).abs() < 1e-12);
        // (X'X)^{-1} for this design: [[0.6, -0.2], [-0.2, 0.1]]
        assert!((ls.xtx_inv[(0, 0)] - 0.6).abs() < 1e-12);
        assert!((ls.xtx_inv[(0, 1)] + 0.2).abs() < 1e-12);
        assert!((ls.xtx_inv[(1, 1)] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn duplicate_column_is_singular() {
        let c = vec![1.0, 2.0, 4.0, 8.0];
        let x = from_columns(&[vec![1.0; 4], c.clone(), c]);
        assert_eq!(least_squares(&x, &[1.0, 2.0, 3.0, 4.0]), Err(StatsError::Singular));
    }

    #[test]
    fn badly_scaled_columns_still_fit() {
        let inc: Vec<f64> = (0..27).map(|i| 600.0 + 70.0 * f64::from(i)).collect();
        let inc2: Vec<f64> = inc.iter().map(|v| v * v).collect();
        let hdi: Vec<f64> = (0..27).map(|i| 0.6 + 0.01 * f64::from((i * 7) % 27)).collect();
        let y: Vec<f64> = (0..27).map(|i| 3.0 - 0.002 * inc[i] + 4e-7 * inc2[i] + 2.0 * hdi[i]).collect();
        let x = from_columns(&[vec![1.0; 27], inc, inc2, hdi]);
        let ls = least_squares(&x, &y).unwrap();
        assert!((ls.coefficients[2] - 4e-7).abs() < 1e-15);
        assert!((ls.coefficients[3] - 2.0).abs() < 1e-8);
    }
}
