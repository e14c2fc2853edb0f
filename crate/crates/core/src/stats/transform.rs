//! Response transforms and profile-likelihood estimation of their parameter.

use alloc::vec::Vec;

use libm::{expm1, fabs, log, log1p, pow};
use nalgebra::DMatrix;

use super::linalg::least_squares;
use super::StatsError;

/// Below this `|lambda|` the limiting (logarithmic) branch is used.
const LAMBDA_ZERO: f64 = 1e-12;
/// Below this `|lambda * ln base|`, `expm1` avoids cancellation in `base^lambda - 1`.
const SMALL_EXPONENT: f64 = 0.5;
const GRID_LO: f64 = -3.0;
const GRID_HI: f64 = 3.0;
const GRID_STEP: f64 = 0.1;
const GOLDEN_TOL: f64 = 1e-5;

/// `base^p - 1` given `ln_base`.
fn pow_minus_one(base: f64, ln_base: f64, p: f64) -> f64 {
    let t = p * ln_base;
    if fabs(t) < SMALL_EXPONENT {
        expm1(t)
    } else {
        pow(base, p) - 1.0
    }
}

pub fn box_cox(y: f64, lambda: f64) -> Result<f64, StatsError> {
    if !(y > 0.0) {
        return Err(StatsError::Domain("Box-Cox needs a positive response"));
    }
    if lambda.abs() < LAMBDA_ZERO {
        Ok(log(y))
    } else {
        Ok(pow_minus_one(y, log(y), lambda) / lambda)
    }
}

pub fn yeo_johnson(y: f64, lambda: f64) -> f64 {
    if y >= 0.0 {
        if lambda.abs() < LAMBDA_ZERO {
            log1p(y)
        } else {
            pow_minus_one(y + 1.0, log1p(y), lambda) / lambda
        }
    } else if (lambda - 2.0).abs() < LAMBDA_ZERO {
        -log1p(-y)
    } else {
        -pow_minus_one(1.0 - y, log1p(-y), 2.0 - lambda) / (2.0 - lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    BoxCox,
    YeoJohnson,
}

/// Transform parameter, either given or estimated at fit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda {
    Fixed(f64),
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    None,
    BoxCox(Lambda),
    YeoJohnson(Lambda),
}

impl Transform {
    pub fn family(self) -> Option<Family> {
        match self {
            Transform::None => None,
            Transform::BoxCox(_) => Some(Family::BoxCox),
            Transform::YeoJohnson(_) => Some(Family::YeoJohnson),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Transform::None => "none",
            Transform::BoxCox(_) => "box-cox",
            Transform::YeoJohnson(_) => "yeo-johnson",
        }
    }
}

/// Applies a family with a concrete parameter to a whole response vector.
pub fn apply(family: Family, y: &[f64], lambda: f64) -> Result<Vec<f64>, StatsError> {
    match family {
        Family::BoxCox => y.iter().map(|&v| box_cox(v, lambda)).collect(),
        Family::YeoJohnson => Ok(y.iter().map(|&v| yeo_johnson(v, lambda)).collect()),
    }
}

/// Log-Jacobian `sum log |dT/dy|` of the transform at `y`.
pub fn log_jacobian(family: Family, y: &[f64], lambda: f64) -> f64 {
    match family {
        Family::BoxCox => (lambda - 1.0) * y.iter().map(|&v| log(v)).sum::<f64>(),
        Family::YeoJohnson => {
            (lambda - 1.0) * y.iter().map(|&v| if v >= 0.0 { log1p(v) } else { -log1p(-v) }).sum::<f64>()
        }
    }
}

/// Gaussian profile log-likelihood of `lambda` with the regression
/// coefficients and variance concentrated out (additive constants dropped).
pub fn profile_log_likelihood(family: Family, y: &[f64], x: &DMatrix<f64>, lambda: f64) -> Result<f64, StatsError> {
    let z = apply(family, y, lambda)?;
    let fit = least_squares(x, &z)?;
    let n = y.len() as f64;
    if !(fit.rss > 0.0) {
        return Err(StatsError::Degenerate("transformed response is fitted exactly"));
    }
    Ok(-0.5 * n * log(fit.rss / n) + log_jacobian(family, y, lambda))
}

/// Maximum-likelihood transform parameter over `[-3, 3]`.
///
/// A coarse grid locates the best cell, then golden-section search refines it
/// to `1e-5`.
pub fn estimate_lambda(y: &[f64], x: &DMatrix<f64>, family: Family) -> Result<f64, StatsError> {
    let (n, k) = x.shape();
    if n <= k + 2 {
        return Err(StatsError::TooFewObservations { needed: k + 3, found: n });
    }
    if family == Family::BoxCox && y.iter().any(|&v| !(v > 0.0)) {
        return Err(StatsError::Domain("Box-Cox needs a positive response"));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(StatsError::Degenerate("constant response"));
    }
    let ll = |l: f64| profile_log_likelihood(family, y, x, l);
    let steps = libm::round((GRID_HI - GRID_LO) / GRID_STEP) as usize;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=steps {
        let l = GRID_LO + GRID_STEP * i as f64;
        let v = ll(l)?;
        if v > best.0 {
            best = (v, l);
        }
    }
    let mut a = (best.1 - GRID_STEP).max(GRID_LO);
    let mut b = (best.1 + GRID_STEP).min(GRID_HI);
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (ll(c)?, ll(d)?);
    while b - a > GOLDEN_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = ll(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = ll(d)?;
        }
    }
    Ok((a + b) / 2.0)
}
