//! Budget-driven parameter selection, error bounds and condition reports.

mod prime;
pub mod tau;
pub mod tractability;

use core::f64::consts::E;

pub use prime::{is_prime, next_prime, prev_prime};
pub use tau::{tau_roots, TauRoots};
pub use tractability::{tractability_diagnostics, tractability_inequality, TractabilityCase, TractabilityReport, WeightSequence};

use crate::index_set::log_p_factor;
use crate::korobov::KorobovSpace;
use crate::median_approx::compute_nstar;
use crate::{Error, Result};

/// Total evaluation budget and failure probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSpec {
    max_evals: u64,
    delta: f64,
}

impl BudgetSpec {
    /// Requires `M_max >= 2` and `0 < δ < 1`.
    pub fn new(max_evals: u64, delta: f64) -> Result<Self> {
        if max_evals < 2 {
            return Err(Error::InvalidArgument("budget must be >= 2"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument("delta must lie in (0, 1)"));
        }
        Ok(Self { max_evals, delta })
    }

    /// `M_max`.
    pub fn max_evals(&self) -> u64 {
        self.max_evals
    }

    /// `δ`.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `2 ln(1 + (N-1)/(4e)) + 2 ln(1/δ)`, the centre of the repetition window.
pub fn repetition_center(modulus: u64, delta: f64) -> f64 {
    2.0 * libm::log1p((modulus as f64 - 1.0) / (4.0 * E)) - 2.0 * libm::log(delta)
}

/// `N (2 ln(1 + (N-1)/(4e)) + 2 ln(1/δ) + 1)`, strictly increasing in `N`.
pub fn budget_lhs(modulus: u64, delta: f64) -> f64 {
    modulus as f64 * (repetition_center(modulus, delta) + 1.0)
}

/// Largest prime `N` with `budget_lhs(N, δ) <= M_max`.
pub fn find_nmax(budget: &BudgetSpec) -> Result<u64> {
    let m = budget.max_evals as f64;
    let fits = |n: u64| budget_lhs(n, budget.delta) <= m;
    if !fits(2) {
        return Err(Error::NoFeasiblePrime(budget.max_evals));
    }
    // largest integer that fits, by bisection on [2, M_max]
    let (mut lo, mut hi) = (2u64, budget.max_evals);
    if fits(hi) {
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    prev_prime(lo)
}

/// Largest odd integer in `[c - 1, c + 1]`, `c` = [`repetition_center`].
pub fn choose_r_window(modulus: u64, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) || modulus < 2 {
        return Err(Error::InvalidArgument("window rule needs N >= 2 and delta in (0, 1)"));
    }
    Ok(largest_odd_at_most(repetition_center(modulus, delta) + 1.0))
}

fn largest_odd_at_most(x: f64) -> u64 {
    let k = libm::floor(x).max(1.0) as u64;
    if k.is_multiple_of(2) {
        k - 1
    } else {
        k
    }
}

/// Largest odd `R <= M_max / N`.
pub fn choose_r_budget(modulus: u64, max_evals: u64) -> Result<u64> {
    if modulus == 0 || max_evals < modulus {
        return Err(Error::InvalidArgument("budget smaller than N"));
    }
    let r = max_evals / modulus;
    Ok(if r.is_multiple_of(2) { r - 1 } else { r })
}

/// Which rule picks `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepetitionRule {
    /// Largest odd `R <= M_max / N`.
    #[default]
    Budget,
    /// The window around `2 ln(1 + (N-1)/(4e)) + 2 ln(1/δ)`.
    Window,
}

/// Why a selection is flagged infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasibility {
    /// `exp(4e/τ_0) P_N(τ_0) > exp(-4e)(N-1)`: the budget is too small for
    /// the feasibility condition at `c = 1/e`.
    ConditionAtTau0,
    /// `N_* < 1`: the index set would be empty.
    EmptyIndexSet,
}

impl Infeasibility {
    /// Short machine-readable label.
    pub fn label(&self) -> &'static str {
        match self {
            Self::ConditionAtTau0 => "condition_at_tau0",
            Self::EmptyIndexSet => "nstar_below_one",
        }
    }
}

/// Parameters chosen for a budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedParams {
    /// Budget the selection was made for.
    pub budget: BudgetSpec,
    /// `N_max`.
    pub modulus: u64,
    /// Selected `τ`.
    pub tau_star: f64,
    /// `τ_0`, `τ'_0` and the feasible interval.
    pub roots: TauRoots,
    /// Odd repetition count.
    pub repetitions: u64,
    /// `N_*` at `τ_*`.
    pub n_star: f64,
    /// `None` when feasible.
    pub infeasibility: Option<Infeasibility>,
}

impl SelectedParams {
    /// True when the feasibility check passed and `N_* >= 1`.
    pub fn feasible(&self) -> bool {
        self.infeasibility.is_none()
    }

    /// `M = N R`.
    pub fn total_evals(&self) -> u64 {
        self.modulus * self.repetitions
    }
}

/// Runs the whole selection: `N_max`, the `τ` roots, `τ_*`, `R` and `N_*`.
///
/// An infeasible budget is not an error. The selection still returns
/// `τ_* = τ'_0` and flags the reason, so that experiments can run regardless
/// and report the condition.
pub fn select_params(budget: &BudgetSpec, space: &KorobovSpace, rule: RepetitionRule) -> Result<SelectedParams> {
    let modulus = find_nmax(budget)?;
    let roots = tau_roots(modulus, space)?;
    let tau_star = roots.tau_star();
    let n_star = compute_nstar(tau_star, space, modulus);
    let repetitions = match rule {
        RepetitionRule::Budget => choose_r_budget(modulus, budget.max_evals)?,
        RepetitionRule::Window => choose_r_window(modulus, budget.delta)?,
    };
    let infeasibility = if !roots.feasible() {
        Some(Infeasibility::ConditionAtTau0)
    } else if n_star < 1.0 {
        Some(Infeasibility::EmptyIndexSet)
    } else {
        None
    };
    Ok(SelectedParams {
        budget: *budget,
        modulus,
        tau_star,
        roots,
        repetitions,
        n_star,
        infeasibility,
    })
}

/// `2/τ + 1 + 2 N ln(N-1) / (N-1)`.
fn error_factor(modulus: u64, tau: f64) -> f64 {
    let n = modulus as f64;
    2.0 / tau + 1.0 + 2.0 * n * libm::log(n - 1.0) / (n - 1.0)
}

/// Squared-error bound `‖f‖² / N_*^{2α} (2/τ + 1 + 2 N ln(N-1)/(N-1))`.
pub fn l2_error_bound(modulus: u64, tau: f64, n_star: f64, alpha: f64, f_norm_sq: f64) -> Result<f64> {
    if !(n_star >= 1.0) {
        return Err(Error::BudgetTooSmall(n_star));
    }
    if modulus < 3 || !(tau > 0.0) {
        return Err(Error::InvalidArgument("bound needs N >= 3 and tau > 0"));
    }
    Ok(f_norm_sq * libm::pow(n_star, -2.0 * alpha) * error_factor(modulus, tau))
}

/// The constant `C_N(τ, δ, α)` of the budget form of the error bound.
pub fn budget_error_constant(modulus: u64, tau: f64, delta: f64, alpha: f64) -> Result<f64> {
    if modulus < 3 || !(tau > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument("constant needs N >= 3, tau > 0, delta in (0, 1)"));
    }
    let n = modulus as f64;
    let ratio = libm::pow(n / (n - 1.0), 2.0 * alpha);
    let window = libm::pow(repetition_center(modulus, delta) + 1.0, 2.0 * alpha);
    Ok(ratio * window * error_factor(modulus, tau))
}

/// One checked inequality `lhs <op> rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    /// Whether it holds.
    pub holds: bool,
    /// Left-hand side.
    pub lhs: f64,
    /// Right-hand side.
    pub rhs: f64,
}

impl Condition {
    fn le(lhs: f64, rhs: f64) -> Self {
        Self { holds: lhs <= rhs, lhs, rhs }
    }

    fn lt(lhs: f64, rhs: f64) -> Self {
        Self { holds: lhs < rhs, lhs, rhs }
    }

    fn ge(lhs: f64, rhs: f64) -> Self {
        Self { holds: lhs >= rhs, lhs, rhs }
    }
}

/// Preconditions of the error bound, evaluated for concrete parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// `N_* >= 1`.
    pub nstar_at_least_one: Condition,
    /// `N_* < N/2`.
    pub nstar_below_half: Condition,
    /// `4(1+τ)/(1 + τ ln N_*) < 1`.
    pub less_than_one: Condition,
    /// `(1 + (N-1)/(1+τ ln N_*)) (4(1+τ)/(1+τ ln N_*))^{⌈R/2⌉} <= δ`.
    pub choose_r_first: Condition,
    /// `N >= P_N exp(e(4/τ + 4)) + 1`, i.e. the `c = 1/e` condition.
    pub less_than_c: Condition,
}

impl ConditionReport {
    /// True if every condition holds.
    pub fn all_hold(&self) -> bool {
        self.entries().iter().all(|(_, c)| c.holds)
    }

    /// Named entries in a fixed order.
    pub fn entries(&self) -> [(&'static str, Condition); 5] {
        [
            ("nstar_at_least_one", self.nstar_at_least_one),
            ("nstar_below_half", self.nstar_below_half),
            ("less_than_one", self.less_than_one),
            ("choose_r_first", self.choose_r_first),
            ("less_than_c", self.less_than_c),
        ]
    }
}

/// Evaluates each precondition; never fails.
///
/// Where `1 + τ ln N_* <= 0` the ratio terms are reported as `+inf`.
pub fn check_conditions(modulus: u64, repetitions: u64, tau: f64, delta: f64, space: &KorobovSpace) -> ConditionReport {
    let n = modulus as f64;
    let n_star = compute_nstar(tau, space, modulus);
    let denom = 1.0 + tau * libm::log(n_star);
    let ratio = if denom > 0.0 { 4.0 * (1.0 + tau) / denom } else { f64::INFINITY };
    let half_r = repetitions.div_ceil(2) as f64;
    let first = if denom > 0.0 {
        (1.0 + (n - 1.0) / denom) * libm::pow(ratio, half_r)
    } else {
        f64::INFINITY
    };
    // compare in logs: the right side overflows for small τ
    let log_rhs = log_p_factor(tau, n, space) + E * (4.0 / tau + 4.0);
    let rhs_c = if log_rhs < 700.0 { libm::exp(log_rhs) + 1.0 } else { f64::INFINITY };
    ConditionReport {
        nstar_at_least_one: Condition::ge(n_star, 1.0),
        nstar_below_half: Condition::lt(n_star, n / 2.0),
        less_than_one: Condition::lt(ratio, 1.0),
        choose_r_first: Condition::le(first, delta),
        less_than_c: Condition {
            // τ_1 and τ_2 meet the condition with equality, so allow root-finder slack
            holds: libm::log(n - 1.0) >= log_rhs - tau::DEGENERATE_TOL * libm::fabs(log_rhs).max(1.0),
            lhs: n,
            rhs: rhs_c,
        },
    }
}
