//! Root finding for the choice of `τ` at a fixed prime `N`.

use core::f64::consts::E;

use crate::index_set::log_p_factor;
use crate::korobov::KorobovSpace;
use crate::math::bisect;
use crate::{Error, Result};

const TAU_MIN: f64 = 1e-9;
const TAU_MAX: f64 = 1e9;
const REL_TOL: f64 = 1e-12;
/// Relative tolerance under which `τ_1 = τ_2 = τ_0` is treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-8;

/// Sum part of the logarithmic derivatives,
/// `sum_j 2 g_j τ ln N / (1 + 2 g_j (1 + τ ln N))` with `g_j = γ_j^{1/(2α)}`.
pub fn log_derivative_sum(tau: f64, modulus: u64, space: &KorobovSpace) -> f64 {
    let ln_n = libm::log(modulus as f64);
    space
        .log_weight_roots()
        .iter()
        .map(|&lr| {
            let g2 = 2.0 * libm::exp(lr);
            g2 * tau * ln_n / (1.0 + g2 * (1.0 + tau * ln_n))
        })
        .sum()
}

/// `τ d/dτ ln(exp(4e/τ) P_N(τ))`; strictly increasing with a unique zero `τ_0`.
pub fn log_derivative_feasibility(tau: f64, modulus: u64, space: &KorobovSpace) -> f64 {
    -4.0 * E / tau + log_derivative_sum(tau, modulus, space)
}

/// `τ d/dτ ln(exp(1/τ) P_N(τ))`; strictly increasing with a unique zero `τ'_0`.
pub fn log_derivative_nstar(tau: f64, modulus: u64, space: &KorobovSpace) -> f64 {
    -1.0 / tau + log_derivative_sum(tau, modulus, space)
}

/// `4e/τ + ln P_N(τ) - (ln(N-1) - 4e)`.
///
/// Non-positive exactly when `N >= P_N(τ) exp(e(4/τ + 4)) + 1`; decreasing on
/// `(0, τ_0]` and increasing on `[τ_0, ∞)`.
pub fn feasibility_gap(tau: f64, modulus: u64, space: &KorobovSpace) -> f64 {
    4.0 * E / tau + log_p_factor(tau, modulus as f64, space) - (libm::log(modulus as f64 - 1.0) - 4.0 * E)
}

/// Zero of a function increasing in `τ`, bracketed by halving/doubling from 1.
fn increasing_root<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let mut lo = 1.0;
    while f(lo) >= 0.0 {
        lo *= 0.5;
        if lo < TAU_MIN {
            return Err(Error::RootFinding("lower bracket for tau fell below 1e-9"));
        }
    }
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > TAU_MAX {
            return Err(Error::RootFinding("upper bracket for tau exceeded 1e9"));
        }
    }
    bisect(f, lo, hi, REL_TOL, 400)
}

/// Roots used by the `τ` selection at a fixed prime `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauRoots {
    /// Zero of [`log_derivative_feasibility`]; minimiser of `exp(4e/τ) P_N(τ)`.
    pub tau0: f64,
    /// Zero of [`log_derivative_nstar`]; maximiser of `N_*(τ)`.
    pub tau0_prime: f64,
    /// `(τ_1, τ_2)`, the feasible interval's ends, when the gap at `τ_0` is
    /// non-positive. `None` means the budget is too small.
    pub interval: Option<(f64, f64)>,
    /// [`feasibility_gap`] at `τ_0`.
    pub gap_at_tau0: f64,
}

impl TauRoots {
    /// True when the feasibility check at `τ_0` passed.
    pub fn feasible(&self) -> bool {
        self.interval.is_some()
    }

    /// `max(τ'_0, τ_1)` if feasible, else `τ'_0` (the unconstrained maximiser
    /// of `N_*`).
    pub fn tau_star(&self) -> f64 {
        match self.interval {
            Some((t1, t2)) if t1 == t2 => self.tau0,
            Some((t1, _)) => self.tau0_prime.max(t1),
            None => self.tau0_prime,
        }
    }
}

/// Computes `τ_0`, `τ'_0` and, when feasible, `τ_1 <= τ_0 <= τ_2`.
pub fn tau_roots(modulus: u64, space: &KorobovSpace) -> Result<TauRoots> {
    if modulus < 2 {
        return Err(Error::InvalidArgument("tau roots need N >= 2"));
    }
    let tau0 = increasing_root(|t| log_derivative_feasibility(t, modulus, space))?;
    let tau0_prime = increasing_root(|t| log_derivative_nstar(t, modulus, space))?;
    let gap = |t: f64| feasibility_gap(t, modulus, space);
    let gap0 = gap(tau0);
    let scale = libm::fabs(libm::log(modulus as f64 - 1.0) - 4.0 * E).max(1.0);
    let interval = if gap0 > DEGENERATE_TOL * scale {
        None
    } else if gap0 >= -DEGENERATE_TOL * scale {
        Some((tau0, tau0))
    } else {
        // gap -> +inf at both ends, so the brackets below always close
        let mut lo = tau0;
        while gap(lo) <= 0.0 {
            lo *= 0.5;
            if lo < TAU_MIN {
                return Err(Error::RootFinding("tau_1 bracket fell below 1e-9"));
            }
        }
        let mut hi = tau0;
        while gap(hi) <= 0.0 {
            hi *= 2.0;
            if hi > TAU_MAX {
                return Err(Error::RootFinding("tau_2 bracket exceeded 1e9"));
            }
        }
        let t1 = bisect(gap, lo, tau0, REL_TOL, 400)?;
        let t2 = bisect(gap, tau0, hi, REL_TOL, 400)?;
        Some((t1, t2))
    };
    Ok(TauRoots {
        tau0,
        tau0_prime,
        interval,
        gap_at_tau0: gap0,
    })
}
