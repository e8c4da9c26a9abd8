//! Small numerical helpers shared across modules.

use crate::{Error, Result};

/// Fractional part `y - floor(y)`, always in `[0, 1)`.
#[inline]
pub fn frac(y: f64) -> f64 {
    let f = y - libm::floor(y);
    // floor can round y - floor(y) up to exactly 1.0 for tiny negative y
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    /// Empty sum.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one term.
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current value of the sum.
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Riemann zeta function for real `q > 1`.
///
/// Euler-Maclaurin summation: 16 explicit terms, the integral tail, and eight
/// Bernoulli corrections. Relative error is below `1e-14` for `q` in
/// `(1, 64]`; larger `q` is dominated by the explicit terms anyway.
pub fn zeta(q: f64) -> Result<f64> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::InvalidArgument("zeta requires finite q > 1"));
    }
    const N: f64 = 16.0;
    let mut s = CompensatedSum::new();
    for n in (1..16).rev() {
        s.add(libm::pow(n as f64, -q));
    }
    let n_pow = libm::pow(N, -q);
    s.add(N * n_pow / (q - 1.0));
    s.add(0.5 * n_pow);
    // term_k = B_2k / (2k)! * q (q+1) ... (q+2k-2) * N^(-q-2k+1)
    let mut rising = q;
    let mut fact = 2.0;
    let mut n_term = n_pow / N;
    for (k, b) in BERNOULLI.iter().enumerate() {
        if k > 0 {
            let m = (2 * k) as f64;
            rising *= (q + m - 1.0) * (q + m);
            fact *= (m + 1.0) * (m + 2.0);
            n_term /= N * N;
        }
        s.add(b / fact * rising * n_term);
    }
    Ok(s.value())
}

/// Partial zeta sum `H_K(q) = sum_{n=1}^{K} n^{-q}` and its derivative in `q`.
///
/// Returns `(H_K(q), H'_K(q))` with `H'_K(q) = -sum log(n) n^{-q}`.
pub fn partial_zeta(terms: u64, q: f64) -> (f64, f64) {
    let mut value = CompensatedSum::new();
    let mut deriv = CompensatedSum::new();
    for n in (1..=terms).rev() {
        let nf = n as f64;
        let t = libm::pow(nf, -q);
        value.add(t);
        deriv.add(-libm::log(nf) * t);
    }
    (value.value(), deriv.value())
}

/// Bisection for a root of a monotone function on `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (zero counts as either). The
/// interval is halved until its width falls below `tol * max(1, |mid|)` or it
/// stops shrinking in floating point. Fails after `max_iter` halvings.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::RootFinding("objective is NaN at bracket end"));
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::RootFinding("bracket does not change sign"));
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= tol * libm::fabs(mid).max(1.0) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm.is_nan() {
            return Err(Error::RootFinding("objective is NaN inside bracket"));
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootFinding("bisection did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn zeta_direct(q: f64) -> f64 {
        // direct sum with midpoint-corrected integral tail; independent of
        // the Euler-Maclaurin path above
        let n = 200_000u64;
        let (h, _) = partial_zeta(n, q);
        let nn = n as f64 + 0.5;
        h + libm::pow(nn, 1.0 - q) / (q - 1.0)
    }

    #[test]
    fn zeta_known_values() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta(1.5).unwrap() - 2.612_375_348_685_488).abs() < 1e-13);
        assert!((zeta(1.1).unwrap() - 10.584_448_464_950_81).abs() < 1e-11);
        assert!((zeta(3.0).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-15);
    }

    #[test]
    fn zeta_matches_direct_summation() {
        for &q in &[1.2, 1.7, 2.5, 3.3, 5.0, 7.5] {
            let a = zeta(q).unwrap();
            let b = zeta_direct(q);
            assert!((a - b).abs() / a < 1e-9, "q={q}: {a} vs {b}");
        }
    }

    #[test]
    fn zeta_rejects_q_at_most_one() {
        assert!(zeta(1.0).is_err());
        assert!(zeta(0.5).is_err());
        assert!(zeta(f64::NAN).is_err());
    }

    #[test]
    fn partial_zeta_harmonic() {
        let (h, d) = partial_zeta(10, 1.0);
        assert!((h - 7381.0 / 2520.0).abs() < 1e-15);
        assert!(d < 0.0);
        assert_eq!(partial_zeta(1, 3.0), (1.0, 0.0));
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-12, 200).is_err());
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let s: CompensatedSum = [1.0, 1e-16, 1e-16, -1.0].into_iter().collect();
        assert!((s.value() - 2e-16).abs() < 1e-30);
    }

    #[test]
    fn frac_range() {
        assert_eq!(frac(3.25), 0.25);
        assert_eq!(frac(-0.25), 0.75);
        assert!(frac(-1e-20) < 1.0);
    }
}
