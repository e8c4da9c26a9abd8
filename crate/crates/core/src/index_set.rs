//! Hyperbolic cross index sets `A_d(L) = {h : r_{2α,γ}(h) <= L^{2α}}` and
//! upper bounds on their cardinality.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::korobov::{FrequencyIndex, KorobovSpace};
use crate::math::{bisect, partial_zeta, zeta};
use crate::{Error, Result};

/// Default cap on the projected cardinality before enumeration starts.
pub const DEFAULT_CARDINALITY_CAP: u64 = 100_000_000;

// Relative slack on the defining inequality so that exact ties (e.g. integer
// L with unit weights) are included despite rounding in the log domain.
const TIE_TOLERANCE: f64 = 1e-12;

/// The enumerated set `A_d(L)`, sorted lexicographically.
#[derive(Debug, Clone)]
pub struct HyperbolicCross {
    radius: f64,
    space: KorobovSpace,
    flat: Vec<i64>,
    lookup: HashMap<Box<[i64]>, usize>,
}

impl HyperbolicCross {
    /// Enumerates `A_d(L)` with [`DEFAULT_CARDINALITY_CAP`].
    pub fn enumerate(radius: f64, space: &KorobovSpace) -> Result<Self> {
        Self::enumerate_with_cap(radius, space, DEFAULT_CARDINALITY_CAP)
    }

    /// Enumerates `A_d(L)`, failing when the projected size exceeds `cap`.
    ///
    /// Empty for `L < 1`. Otherwise a depth-first recursion over coordinates:
    /// with remaining log-budget `b`, coordinate `j` ranges over
    /// `|h_j| <= floor(exp(b) γ_j^{1/(2α)})`, and a non-zero `h_j` consumes
    /// `ln|h_j| - ln γ_j^{1/(2α)}` of the budget.
    pub fn enumerate_with_cap(radius: f64, space: &KorobovSpace, cap: u64) -> Result<Self> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::InvalidArgument("index set radius must be >= 0"));
        }
        let mut out = Self {
            radius,
            space: space.clone(),
            flat: Vec::new(),
            lookup: HashMap::new(),
        };
        if radius < 1.0 {
            return Ok(out);
        }
        if !radius.is_finite() {
            return Err(Error::CapExceeded {
                projected: f64::INFINITY,
                cap,
            });
        }
        let projected = projected_size(radius, space)?;
        if projected > cap as f64 {
            return Err(Error::CapExceeded { projected, cap });
        }

        let d = space.dim();
        let log_l = libm::log(radius);
        let slack = TIE_TOLERANCE * (1.0 + log_l);
        let mut current = alloc::vec![0i64; d];
        enumerate_rec(space.log_weight_roots(), 0, log_l + slack, &mut current, &mut out.flat);

        out.lookup.reserve(out.flat.len() / d);
        for (i, h) in out.flat.chunks_exact(d).enumerate() {
            out.lookup.insert(h.into(), i);
        }
        Ok(out)
    }

    /// The radius `L`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The space the set was built for.
    pub fn space(&self) -> &KorobovSpace {
        &self.space
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Cardinality `|A_d(L)|`.
    pub fn len(&self) -> usize {
        self.flat.len() / self.space.dim()
    }

    /// True for `L < 1`.
    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    /// The `i`-th index in lexicographic order.
    pub fn get(&self, i: usize) -> &[i64] {
        let d = self.dim();
        &self.flat[i * d..(i + 1) * d]
    }

    /// Indices in lexicographic order.
    pub fn iter(&self) -> core::slice::ChunksExact<'_, i64> {
        self.flat.chunks_exact(self.space.dim())
    }

    /// Position of `h` in the ordering, if present.
    pub fn position(&self, h: &[i64]) -> Option<usize> {
        self.lookup.get(h).copied()
    }

    /// Membership test.
    pub fn contains(&self, h: &[i64]) -> bool {
        self.lookup.contains_key(h)
    }

    /// Owned copies of the indices.
    pub fn to_indices(&self) -> Vec<FrequencyIndex> {
        self.iter().map(FrequencyIndex::from).collect()
    }

    /// Writes `h_1,...,h_d` then one integer row per index.
    pub fn write_csv<W: fmt::Write>(&self, w: &mut W) -> fmt::Result {
        write_header_row(w, self.dim())?;
        w.write_char('\n')?;
        for h in self.iter() {
            write_int_row(w, h)?;
            w.write_char('\n')?;
        }
        Ok(())
    }
}

pub(crate) fn write_header_row<W: fmt::Write>(w: &mut W, dim: usize) -> fmt::Result {
    for j in 1..=dim {
        if j > 1 {
            w.write_char(',')?;
        }
        write!(w, "h_{j}")?;
    }
    Ok(())
}

pub(crate) fn write_int_row<W: fmt::Write>(w: &mut W, h: &[i64]) -> fmt::Result {
    for (j, x) in h.iter().enumerate() {
        if j > 0 {
            w.write_char(',')?;
        }
        write!(w, "{x}")?;
    }
    Ok(())
}

fn enumerate_rec(log_roots: &[f64], j: usize, budget: f64, current: &mut [i64], out: &mut Vec<i64>) {
    if j == log_roots.len() {
        out.extend_from_slice(current);
        return;
    }
    let lr = log_roots[j];
    // largest m with ln m - lr <= budget
    let mut max_m = libm::floor(libm::exp(budget + lr)) as i64;
    while max_m >= 1 && libm::log(max_m as f64) - lr > budget {
        max_m -= 1;
    }
    while libm::log((max_m + 1) as f64) - lr <= budget {
        max_m += 1;
    }
    for h in -max_m..=max_m {
        current[j] = h;
        let rest = if h == 0 {
            budget
        } else {
            budget - (libm::log(h.unsigned_abs() as f64) - lr)
        };
        enumerate_rec(log_roots, j + 1, rest, current, out);
    }
    current[j] = 0;
}

fn projected_size(radius: f64, space: &KorobovSpace) -> Result<f64> {
    let mut best = f64::INFINITY;
    for tau in [0.25, 0.5, 1.0, 2.0, 4.0] {
        best = best.min(bound_basic(radius, tau, space)?);
    }
    Ok(best)
}

/// `P_L(τ,d,γ) = prod_j (1 + 2 γ_j^{1/(2α)} (1 + τ ln L))`, in log form.
pub fn log_p_factor(tau: f64, radius: f64, space: &KorobovSpace) -> f64 {
    let s = 1.0 + tau * libm::log(radius);
    space
        .log_weight_roots()
        .iter()
        .map(|&lr| libm::log1p(2.0 * libm::exp(lr) * s))
        .sum()
}

/// Cardinality bound `1 + L e^{1/τ} / (1 + τ ln L) · P_L(τ,d,γ)`.
pub fn bound_basic(radius: f64, tau: f64, space: &KorobovSpace) -> Result<f64> {
    if !(radius >= 1.0) {
        return Err(Error::InvalidArgument("bound_basic requires L >= 1"));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("bound_basic requires tau > 0"));
    }
    let log_l = libm::log(radius);
    let log_body = log_l + 1.0 / tau - libm::log1p(tau * log_l) + log_p_factor(tau, radius, space);
    Ok(1.0 + libm::exp(log_body))
}

/// `1 + min_{q in grid} L^q / ζ(q) · prod_j (1 + 2 γ_j^{q/(2α)} ζ(q))`.
pub fn bound_min_q(radius: f64, space: &KorobovSpace, q_grid: &[f64]) -> Result<f64> {
    if !(radius >= 1.0) {
        return Err(Error::InvalidArgument("bound_min_q requires L >= 1"));
    }
    if q_grid.is_empty() {
        return Err(Error::InvalidArgument("q grid is empty"));
    }
    let mut best = f64::INFINITY;
    for &q in q_grid {
        if !(q > 1.0) {
            return Err(Error::InvalidArgument("every q in the grid must be > 1"));
        }
        let z = zeta(q)?;
        best = best.min(zeta_type_bound(radius, space, q, z));
    }
    Ok(best)
}

fn zeta_type_bound(radius: f64, space: &KorobovSpace, q: f64, z: f64) -> f64 {
    let log_prod: f64 = (0..space.dim())
        .map(|j| libm::log1p(2.0 * space.weight_root_pow(j, q) * z))
        .sum();
    1.0 + libm::exp(q * libm::log(radius) - libm::log(z) + log_prod)
}

/// `H_L(q) = sum_{n=1}^{floor(L)} n^{-q}` with its `q`-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialZetaSum {
    /// The radius `L`.
    pub radius: f64,
    /// Exponent `q >= 1`.
    pub q: f64,
    /// `H_L(q)`.
    pub value: f64,
    /// `H'_L(q)`, non-positive.
    pub derivative: f64,
}

impl PartialZetaSum {
    /// Requires `L >= 1` and `q >= 1`.
    pub fn new(radius: f64, q: f64) -> Result<Self> {
        if !(radius >= 1.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument("partial zeta sum requires finite L >= 1"));
        }
        if !(q >= 1.0) {
            return Err(Error::InvalidArgument("partial zeta sum requires q >= 1"));
        }
        let (value, derivative) = partial_zeta(libm::floor(radius) as u64, q);
        Ok(Self {
            radius,
            q,
            value,
            derivative,
        })
    }
}

/// Refined bound with the minimising exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedBound {
    /// `1 + L^{q*}/H_L(q*) · prod_j (1 + 2 γ_j^{q*/(2α)} H_L(q*))`.
    pub value: f64,
    /// Exponent used.
    pub q_star: f64,
    /// Right end of the monotone region, where `sum_j w_j = 1` (1 if none).
    pub q_bar: f64,
}

fn refined_value(radius: f64, space: &KorobovSpace, q: f64) -> Result<f64> {
    let h = PartialZetaSum::new(radius, q)?.value;
    Ok(zeta_type_bound(radius, space, q, h))
}

fn weight_shares(space: &KorobovSpace, q: f64, h: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
    (0..space.dim()).map(move |j| {
        let t = 2.0 * space.weight_root_pow(j, q) * h;
        (j, t / (1.0 + t))
    })
}

// Largest exponent searched; past it `L^q` dominates any bound of interest.
const Q_CAP: f64 = 64.0;

/// Cardinality bound with partial zeta sums, minimised over `q >= 1`.
///
/// The minimiser is the zero of the logarithmic derivative on `[1, q̄]`,
/// where the left side
/// `-(H'/H)(sum w_j - 1) - (1/2α) sum w_j ln γ_j` is decreasing (`q̄` is
/// capped at 64 when `sum w_j` never drops to 1). If that
/// side is already `<= ln L` at `q = 1`, `q* = 1`. If it stays above `ln L`
/// on the whole interval, the smaller of the two endpoint values is used.
/// Any `q >= 1` gives a valid bound.
pub fn bound_refined(radius: f64, space: &KorobovSpace) -> Result<RefinedBound> {
    if !(radius >= 1.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument("bound_refined requires finite L >= 1"));
    }
    let log_l = libm::log(radius);
    let sum_w = |q: f64| -> f64 {
        let h = PartialZetaSum::new(radius, q).map(|p| p.value).unwrap_or(f64::NAN);
        weight_shares(space, q, h).map(|(_, w)| w).sum()
    };
    let lhs = |q: f64| -> f64 {
        let p = match PartialZetaSum::new(radius, q) {
            Ok(p) => p,
            Err(_) => return f64::NAN,
        };
        let mut total_w = 0.0;
        let mut weighted_log = 0.0;
        for (j, w) in weight_shares(space, q, p.value) {
            total_w += w;
            weighted_log += w * libm::log(space.gamma(j));
        }
        -(p.derivative / p.value) * (total_w - 1.0) - weighted_log / (2.0 * space.alpha())
    };

    let q_bar = if sum_w(1.0) <= 1.0 {
        1.0
    } else {
        if sum_w(Q_CAP) >= 1.0 {
            // two or more unit weights keep sum w_j above 1 for every q
            Q_CAP
        } else {
            bisect(|q| sum_w(q) - 1.0, 1.0, Q_CAP, 1e-12, 200)?
        }
    };

    let q_star = if lhs(1.0) <= log_l {
        1.0
    } else if lhs(q_bar) <= log_l {
        bisect(|q| lhs(q) - log_l, 1.0, q_bar, 1e-10, 200)?
    } else {
        let a = refined_value(radius, space, 1.0)?;
        let b = refined_value(radius, space, q_bar)?;
        if a <= b {
            1.0
        } else {
            q_bar
        }
    };
    Ok(RefinedBound {
        value: refined_value(radius, space, q_star)?,
        q_star,
        q_bar,
    })
}

/// `1 + (N - 1) / (1 + τ ln N_*)`, valid for `N_* >= 1`.
pub fn nstar_cardinality_cap(modulus: u64, tau: f64, n_star: f64) -> Result<f64> {
    if !(n_star >= 1.0) {
        return Err(Error::BudgetTooSmall(n_star));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("tau must be > 0"));
    }
    Ok(1.0 + (modulus as f64 - 1.0) / (1.0 + tau * libm::log(n_star)))
}
