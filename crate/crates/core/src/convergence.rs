//! Exact squared L2 error of an approximation and log-log rate fits.

use crate::korobov::SpectralOracle;
use crate::math::CompensatedSum;
use crate::median_approx::MedianApproximation;
use crate::{Error, Result};

/// Tolerance below which a negative squared error is treated as rounding.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// `‖f‖² - sum_A |f̂(h)|² + sum_A |c_h - f̂(h)|²`, by Parseval.
///
/// Negative results within [`NEGATIVE_TOLERANCE`] (relative to `‖f‖²`, or
/// absolute when that is below one) are floored at zero; anything more
/// negative means the oracle's norm and coefficients disagree.
pub fn exact_squared_error<F: SpectralOracle + ?Sized>(f: &F, approx: &MedianApproximation) -> Result<f64> {
    if f.dim() != approx.index_set().dim() {
        return Err(Error::DimensionMismatch {
            expected: approx.index_set().dim(),
            actual: f.dim(),
        });
    }
    let norm = f.l2_norm_sq();
    let mut truncation = CompensatedSum::new();
    truncation.add(norm);
    let mut estimation = CompensatedSum::new();
    for (h, c) in approx.index_set().iter().zip(approx.coefficients()) {
        let exact = f.coefficient(h);
        truncation.add(-exact.norm_sqr());
        estimation.add((c - exact).norm_sqr());
    }
    let err = truncation.value() + estimation.value();
    if err >= 0.0 {
        Ok(err)
    } else if -err <= NEGATIVE_TOLERANCE * norm.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::InconsistentOracle(err))
    }
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Slope, the empirical rate exponent.
    pub slope: f64,
    /// Intercept in log space.
    pub intercept: f64,
    /// Coefficient of determination.
    pub r_squared: f64,
}

/// Fits `ln y = slope ln x + intercept`; needs at least three positive points.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::Fit("need at least three points"));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::Fit("all values must be positive and finite"));
    }
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + libm::log(x), b + libm::log(y)));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let dx = libm::log(x) - mx;
        let dy = libm::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Fit("x values are all equal"));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}
