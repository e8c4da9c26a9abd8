//! Weighted Korobov spaces with product weights, and test functions whose
//! Fourier coefficients are known in closed form.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Deref;

use num_complex::Complex64;

use crate::math::{zeta, CompensatedSum};
use crate::{Error, Result};

/// Non-increasing product weights `1 >= γ_1 >= γ_2 >= ... > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductWeights {
    gammas: Vec<f64>,
}

impl ProductWeights {
    /// Validates `0 < γ_j <= 1` and `γ_j >= γ_{j+1}`.
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if gammas.iter().any(|&g| !(g > 0.0 && g <= 1.0)) {
            return Err(Error::InvalidWeights("every weight must lie in (0, 1]"));
        }
        if gammas.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidWeights("weights must be non-increasing"));
        }
        Ok(Self { gammas })
    }

    /// `γ_j = 1` for `j = 1..=dim`.
    pub fn unit(dim: usize) -> Self {
        Self {
            gammas: alloc::vec![1.0; dim],
        }
    }

    /// Polynomially decaying weights `γ_j = j^{-beta}`, `j = 1..=dim`.
    pub fn poly(beta: f64, dim: usize) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidWeights("poly decay exponent must be >= 0"));
        }
        Self::new((1..=dim).map(|j| libm::pow(j as f64, -beta)).collect())
    }

    /// All weights.
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Number of stored weights.
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    /// True when no weights are stored.
    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Product weight `γ_u = prod_{j in u} γ_j` for zero-based coordinates.
    /// The empty set gives 1.
    pub fn subset_weight(&self, coords: &[usize]) -> f64 {
        coords.iter().map(|&j| self.gammas[j]).product()
    }
}

/// Smoothness `α > 1/2` and dimension `d >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessParams {
    alpha: f64,
    dim: usize,
}

impl SmoothnessParams {
    /// Validates `α > 1/2` and `d >= 1`.
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha > 0.5) || !alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite and > 1/2"));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1"));
        }
        Ok(Self { alpha, dim })
    }

    /// Smoothness parameter.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Smoothness together with weights that cover its dimension.
///
/// Only the first `dim` weights are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct KorobovSpace {
    params: SmoothnessParams,
    weights: ProductWeights,
    // ln(γ_j) / (2α), the log of γ_j^{1/(2α)}
    log_roots: Vec<f64>,
}

impl KorobovSpace {
    /// Fails when `weights` has fewer than `params.dim()` entries.
    pub fn new(params: SmoothnessParams, weights: &ProductWeights) -> Result<Self> {
        if weights.len() < params.dim {
            return Err(Error::DimensionMismatch {
                expected: params.dim,
                actual: weights.len(),
            });
        }
        let weights = ProductWeights {
            gammas: weights.gammas[..params.dim].to_vec(),
        };
        let log_roots = weights
            .gammas
            .iter()
            .map(|&g| libm::log(g) / (2.0 * params.alpha))
            .collect();
        Ok(Self {
            params,
            weights,
            log_roots,
        })
    }

    /// Convenience constructor from raw values.
    pub fn with(alpha: f64, gammas: &[f64]) -> Result<Self> {
        let params = SmoothnessParams::new(alpha, gammas.len())?;
        Self::new(params, &ProductWeights::new(gammas.to_vec())?)
    }

    /// Smoothness and dimension.
    pub fn params(&self) -> SmoothnessParams {
        self.params
    }

    /// Weights truncated to the dimension.
    pub fn weights(&self) -> &ProductWeights {
        &self.weights
    }

    /// `α`.
    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    /// `d`.
    pub fn dim(&self) -> usize {
        self.params.dim
    }

    /// `γ_j` for zero-based `j`.
    pub fn gamma(&self, j: usize) -> f64 {
        self.weights.gammas[j]
    }

    /// `ln(γ_j^{1/(2α)})` for every coordinate.
    pub fn log_weight_roots(&self) -> &[f64] {
        &self.log_roots
    }

    /// `γ_j^{q/(2α)}` for zero-based `j`.
    pub fn weight_root_pow(&self, j: usize, q: f64) -> f64 {
        libm::exp(q * self.log_roots[j])
    }

    /// `r_{2α,γ}(h)`, see [`r_weight`].
    pub fn r_weight(&self, h: &[i64]) -> Result<f64> {
        r_weight(h, self.params, &self.weights)
    }
}

/// Integer frequency vector `h ∈ Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequencyIndex(pub Vec<i64>);

impl FrequencyIndex {
    /// The zero frequency in dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        Self(alloc::vec![0; dim])
    }

    /// Componentwise negation.
    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&x| -x).collect())
    }
}

impl Deref for FrequencyIndex {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for FrequencyIndex {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl From<&[i64]> for FrequencyIndex {
    fn from(v: &[i64]) -> Self {
        Self(v.to_vec())
    }
}

/// `r_{2α,γ}(h) = prod_j max(|h_j|^{2α} / γ_j, 1)`.
///
/// Saturates to `+∞` on overflow; callers treat that as outside every index
/// set.
pub fn r_weight(h: &[i64], params: SmoothnessParams, weights: &ProductWeights) -> Result<f64> {
    if h.len() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            actual: h.len(),
        });
    }
    if weights.len() < params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            actual: weights.len(),
        });
    }
    let two_alpha = 2.0 * params.alpha;
    let mut r = 1.0f64;
    for (&hj, &g) in h.iter().zip(weights.gammas()) {
        if hj != 0 {
            let t = libm::pow(hj.unsigned_abs() as f64, two_alpha) / g;
            r *= t.max(1.0);
        }
    }
    if r.is_nan() || r > f64::MAX {
        return Ok(f64::INFINITY);
    }
    Ok(r)
}

/// A function known through its Fourier coefficients.
///
/// Implementors are immutable and shareable across threads.
pub trait SpectralOracle: Send + Sync {
    /// Dimension `d`.
    fn dim(&self) -> usize;

    /// Fourier coefficient `f̂(h)`.
    fn coefficient(&self, h: &[i64]) -> Complex64;

    /// Exact `‖f‖²_{L2}`.
    fn l2_norm_sq(&self) -> f64;

    /// Pointwise value at `x ∈ [0,1)^d`.
    fn evaluate(&self, x: &[f64]) -> f64;

    /// `sum_{‖h‖_∞ <= radius} |f̂(h)|² r_{2α,γ}(h)`.
    ///
    /// The default scans the whole box; product functions override it with a
    /// factorised sum.
    fn korobov_norm_sq_truncated(&self, space: &KorobovSpace, radius: u32) -> f64 {
        let d = self.dim();
        let r = radius as i64;
        let mut h = alloc::vec![-r; d];
        let mut acc = CompensatedSum::new();
        loop {
            let c = self.coefficient(&h);
            let w = space.r_weight(&h).unwrap_or(f64::INFINITY);
            let m = c.norm_sqr();
            if m > 0.0 {
                acc.add(m * w);
            }
            // odometer increment
            let mut j = 0;
            loop {
                if j == d {
                    return acc.value();
                }
                if h[j] < r {
                    h[j] += 1;
                    break;
                }
                h[j] = -r;
                j += 1;
            }
        }
    }
}

/// Free-function form of [`SpectralOracle::korobov_norm_sq_truncated`].
pub fn korobov_norm_sq_truncated<F: SpectralOracle + ?Sized>(
    f: &F,
    space: &KorobovSpace,
    radius: u32,
) -> f64 {
    f.korobov_norm_sq_truncated(space, radius)
}

/// A one-dimensional periodic factor with known Fourier coefficients.
pub trait UnivariateFactor: Send + Sync {
    /// `ĝ(h)`.
    fn coefficient(&self, h: i64) -> Complex64;
    /// `‖g‖²_{L2}`.
    fn l2_norm_sq(&self) -> f64;
    /// `g(x)` for `x ∈ [0,1)`.
    fn evaluate(&self, x: f64) -> f64;
}

/// Scaled periodized kink `(121√33/100) max(25/121 - (x - 1/2)², 0)`.
///
/// Unit L2 norm. With `t = x - 1/2`, `a = 5/11` and `ω = 2πh`:
/// `ĝ(0) = 4Aa³/3 = 5/√33` and
/// `ĝ(h) = (-1)^h · 4A (sin(ωa) - ωa cos(ωa)) / ω³`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kink;

const KINK_HALF_WIDTH: f64 = 5.0 / 11.0;

fn kink_scale() -> f64 {
    121.0 * libm::sqrt(33.0) / 100.0
}

impl UnivariateFactor for Kink {
    fn coefficient(&self, h: i64) -> Complex64 {
        let a = KINK_HALF_WIDTH;
        let scale = kink_scale();
        if h == 0 {
            return Complex64::new(4.0 * scale * a * a * a / 3.0, 0.0);
        }
        let w = 2.0 * PI * h as f64;
        let wa = w * a;
        let v = 4.0 * scale * (libm::sin(wa) - wa * libm::cos(wa)) / (w * w * w);
        let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * v, 0.0)
    }

    fn l2_norm_sq(&self) -> f64 {
        // A² · 16a⁵/15 = 1
        let a = KINK_HALF_WIDTH;
        let scale = kink_scale();
        scale * scale * 16.0 * libm::pow(a, 5.0) / 15.0
    }

    fn evaluate(&self, x: f64) -> f64 {
        let t = x - 0.5;
        let a = KINK_HALF_WIDTH;
        kink_scale() * (a * a - t * t).max(0.0)
    }
}

/// `(x - 1/2)² sin(2πx - π)`.
///
/// With `t = x - 1/2` this is `t² sin(2πt)`, odd about `x = 1/2`, so every
/// coefficient is imaginary: `ĝ(h) = -i (-1)^h (C(h-1) - C(h+1)) / 2` where
/// `C(0) = 1/12` and `C(m) = (-1)^m / (2π²m²)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmoothBump;

fn cos_moment(m: i64) -> f64 {
    if m == 0 {
        1.0 / 12.0
    } else {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign / (2.0 * PI * PI * (m * m) as f64)
    }
}

impl UnivariateFactor for SmoothBump {
    fn coefficient(&self, h: i64) -> Complex64 {
        let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
        let v = 0.5 * (cos_moment(h - 1) - cos_moment(h + 1));
        Complex64::new(0.0, -sign * v)
    }

    fn l2_norm_sq(&self) -> f64 {
        1.0 / 160.0 - 1.0 / (32.0 * PI * PI) + 3.0 / (64.0 * PI * PI * PI * PI)
    }

    fn evaluate(&self, x: f64) -> f64 {
        let t = x - 0.5;
        t * t * libm::sin(2.0 * PI * x - PI)
    }
}

/// `f(x) = prod_j g(x_j)` for a univariate factor `g`.
#[derive(Debug, Clone, Copy)]
pub struct TensorProduct<G> {
    factor: G,
    dim: usize,
}

impl<G: UnivariateFactor> TensorProduct<G> {
    /// Tensor power of `factor` in dimension `dim`.
    pub fn new(factor: G, dim: usize) -> Self {
        Self { factor, dim }
    }

    /// The univariate factor.
    pub fn factor(&self) -> &G {
        &self.factor
    }
}

impl<G: UnivariateFactor> SpectralOracle for TensorProduct<G> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn coefficient(&self, h: &[i64]) -> Complex64 {
        h.iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &hj| acc * self.factor.coefficient(hj))
    }

    fn l2_norm_sq(&self) -> f64 {
        libm::pow(self.factor.l2_norm_sq(), self.dim as f64)
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        x.iter().map(|&xj| self.factor.evaluate(xj)).product()
    }

    fn korobov_norm_sq_truncated(&self, space: &KorobovSpace, radius: u32) -> f64 {
        let two_alpha = 2.0 * space.alpha();
        let r = radius as i64;
        let mags: Vec<f64> = (-r..=r)
            .map(|h| self.factor.coefficient(h).norm_sqr())
            .collect();
        (0..self.dim)
            .map(|j| {
                let g = space.gamma(j);
                let s: CompensatedSum = (-r..=r)
                    .zip(&mags)
                    .map(|(h, &m)| {
                        if h == 0 {
                            m
                        } else {
                            m * (libm::pow(h.unsigned_abs() as f64, two_alpha) / g).max(1.0)
                        }
                    })
                    .collect();
                s.value()
            })
            .product()
    }
}

/// Kink test function `f₁` (smoothness just below 3/2).
pub fn test_function_f1(dim: usize) -> TensorProduct<Kink> {
    TensorProduct::new(Kink, dim)
}

/// Smooth test function `f₂` (smoothness just below 5/2).
pub fn test_function_f2(dim: usize) -> TensorProduct<SmoothBump> {
    TensorProduct::new(SmoothBump, dim)
}

/// Sparse trigonometric polynomial `sum_k c_k exp(2πi h_k·x)`.
///
/// [`SpectralOracle::evaluate`] returns the real part; real-valued inputs
/// need conjugate-symmetric terms (see [`TrigPolynomial::cosine_pair`]).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    terms: Vec<(FrequencyIndex, Complex64)>,
}

impl TrigPolynomial {
    /// Sums duplicated frequencies. All frequencies must have length `dim`.
    pub fn new(dim: usize, terms: Vec<(FrequencyIndex, Complex64)>) -> Result<Self> {
        let mut merged: Vec<(FrequencyIndex, Complex64)> = Vec::with_capacity(terms.len());
        for (h, c) in terms {
            if h.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: h.len(),
                });
            }
            match merged.iter_mut().find(|(g, _)| *g == h) {
                Some((_, acc)) => *acc += c,
                None => merged.push((h, c)),
            }
        }
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self { dim, terms: merged })
    }

    /// Single complex exponential `exp(2πi h·x)`.
    pub fn mode(h: FrequencyIndex) -> Self {
        let dim = h.len();
        Self {
            dim,
            terms: alloc::vec![(h, Complex64::new(1.0, 0.0))],
        }
    }

    /// `exp(2πi h₀·x) + exp(-2πi h₀·x) = 2 cos(2π h₀·x)`.
    pub fn cosine_pair(h0: FrequencyIndex) -> Self {
        let neg = h0.negated();
        let dim = h0.len();
        Self::new(
            dim,
            alloc::vec![(h0, Complex64::new(1.0, 0.0)), (neg, Complex64::new(1.0, 0.0))],
        )
        .expect("same dimension by construction")
    }

    /// Non-zero terms in lexicographic order.
    pub fn terms(&self) -> &[(FrequencyIndex, Complex64)] {
        &self.terms
    }

    /// Complex value `sum_k c_k exp(2πi h_k·x)`.
    pub fn evaluate_complex(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(h, c)| {
                let phase: f64 = h.iter().zip(x).map(|(&hj, &xj)| hj as f64 * xj).sum();
                c * Complex64::from_polar(1.0, 2.0 * PI * phase)
            })
            .sum()
    }
}

impl SpectralOracle for TrigPolynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn coefficient(&self, h: &[i64]) -> Complex64 {
        self.terms
            .iter()
            .find(|(g, _)| g.as_slice() == h)
            .map(|&(_, c)| c)
            .unwrap_or_default()
    }

    fn l2_norm_sq(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.evaluate_complex(x).re
    }

    fn korobov_norm_sq_truncated(&self, space: &KorobovSpace, radius: u32) -> f64 {
        let r = radius as i64;
        self.terms
            .iter()
            .filter(|(h, _)| h.iter().all(|&x| x.abs() <= r))
            .map(|(h, c)| c.norm_sqr() * space.r_weight(h).unwrap_or(f64::INFINITY))
            .sum()
    }
}

impl FrequencyIndex {
    /// Components as a slice.
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

/// `prod_{j=1}^d (1 + 2 γ_j ζ(2α))`, the factor bounding any coefficient
/// estimate by the Korobov norm.
pub fn worst_realization_norm_factor(space: &KorobovSpace) -> Result<f64> {
    let z = zeta(2.0 * space.alpha())?;
    Ok(space
        .weights()
        .gammas()
        .iter()
        .map(|&g| 1.0 + 2.0 * g * z)
        .product())
}
