//! The median lattice algorithm: repetitions, componentwise median,
//! evaluation, and Monte-Carlo checks of the per-coefficient error bounds.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Mul};

use num_complex::Complex64;

use crate::index_set::{log_p_factor, HyperbolicCross, DEFAULT_CARDINALITY_CAP};
use crate::korobov::{KorobovSpace, SpectralOracle};
use crate::lattice::{
    draw_generating_vector, draw_shift, estimate_at, sample_nodes, stream, GeneratingVector, LatticeConfig,
    RandomShift, RootTable, StreamPurpose,
};
use crate::math::CompensatedSum;
use crate::{Error, Result};

/// Componentwise median `med(Re) + i med(Im)` of an odd number of values.
pub fn complex_median(values: &[Complex64]) -> Result<Complex64> {
    if values.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument("median needs an odd, nonzero number of values"));
    }
    let mut re: Vec<f64> = values.iter().map(|c| c.re).collect();
    let mut im: Vec<f64> = values.iter().map(|c| c.im).collect();
    Ok(Complex64::new(middle(&mut re), middle(&mut im)))
}

fn middle(v: &mut [f64]) -> f64 {
    let k = v.len() / 2;
    *v.select_nth_unstable_by(k, |a, b| a.total_cmp(b)).1
}

/// `ln P_N(τ,d,γ)`.
pub fn log_pn(tau: f64, space: &KorobovSpace, modulus: u64) -> f64 {
    log_p_factor(tau, modulus as f64, space)
}

/// `P_N(τ,d,γ) = prod_j (1 + 2 γ_j^{1/(2α)} (1 + τ ln N))`.
pub fn compute_pn(tau: f64, space: &KorobovSpace, modulus: u64) -> f64 {
    libm::exp(log_pn(tau, space, modulus))
}

/// `N_* = (N-1) / (exp(1/τ) P_N)`, accumulated in log space.
pub fn compute_nstar(tau: f64, space: &KorobovSpace, modulus: u64) -> f64 {
    libm::exp(libm::log(modulus as f64 - 1.0) - 1.0 / tau - log_pn(tau, space, modulus))
}

/// `N`, `R`, `τ`, and the derived `P_N`, `N_*`, plus the master seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmParams {
    modulus: u64,
    repetitions: u64,
    tau: f64,
    p_n: f64,
    n_star: f64,
    master_seed: u64,
}

impl AlgorithmParams {
    /// Validates `N` prime, `R` odd, `τ > 0` and `N_* >= 1`.
    pub fn new(modulus: u64, repetitions: u64, tau: f64, master_seed: u64, space: &KorobovSpace) -> Result<Self> {
        LatticeConfig::new(modulus, space.dim())?;
        if repetitions.is_multiple_of(2) {
            return Err(Error::InvalidArgument("R must be odd"));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidArgument("tau must be finite and > 0"));
        }
        let n_star = compute_nstar(tau, space, modulus);
        if !(n_star >= 1.0) {
            return Err(Error::BudgetTooSmall(n_star));
        }
        Ok(Self {
            modulus,
            repetitions,
            tau,
            p_n: compute_pn(tau, space, modulus),
            n_star,
            master_seed,
        })
    }

    /// `N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `R`.
    pub fn repetitions(&self) -> u64 {
        self.repetitions
    }

    /// `τ`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `P_N(τ,d,γ)`.
    pub fn p_n(&self) -> f64 {
        self.p_n
    }

    /// `N_*`.
    pub fn n_star(&self) -> f64 {
        self.n_star
    }

    /// Master seed.
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// `(1+τ) / (1 + τ ln N_*)`, the single-estimate failure bound.
    pub fn concentration_bound(&self) -> f64 {
        (1.0 + self.tau) / (1.0 + self.tau * libm::log(self.n_star))
    }

    /// `(4(1+τ)/(1 + τ ln N_*))^{⌈R/2⌉}` for a given `R`.
    pub fn amplified_bound(&self, repetitions: u64) -> f64 {
        libm::pow(4.0 * self.concentration_bound(), repetitions.div_ceil(2) as f64)
    }
}

/// The random draw of one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionDraw {
    /// Repetition index `r`, starting at 0.
    pub index: u64,
    /// `z_r`.
    pub z: GeneratingVector,
    /// `Δ_r`.
    pub shift: RandomShift,
}

/// Draws `(z_r, Δ_r)` from the streams keyed by `(seed, r)`.
pub fn draw_repetition(config: &LatticeConfig, master_seed: u64, index: u64) -> RepetitionDraw {
    let z = draw_generating_vector(config, &mut stream(master_seed, index, StreamPurpose::GeneratingVector));
    let shift = draw_shift(config, &mut stream(master_seed, index, StreamPurpose::Shift));
    RepetitionDraw { index, z, shift }
}

/// One repetition's coefficient estimates, aligned with the index set.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionEstimate {
    /// The draw used.
    pub draw: RepetitionDraw,
    /// Estimates in index-set order.
    pub coefficients: Vec<Complex64>,
}

/// Shared state for running the repetitions of one configuration.
///
/// Build once, then call [`Plan::run_repetition`] for each `r` in any order
/// or on any thread, and reduce with [`Plan::aggregate`].
#[derive(Debug, Clone)]
pub struct Plan {
    params: AlgorithmParams,
    config: LatticeConfig,
    index_set: HyperbolicCross,
    roots: RootTable,
}

impl Plan {
    /// Enumerates `A_d(N_*)` under the default cardinality cap.
    pub fn new(params: AlgorithmParams, space: &KorobovSpace) -> Result<Self> {
        Self::with_cap(params, space, DEFAULT_CARDINALITY_CAP)
    }

    /// As [`Plan::new`] with an explicit cap on `|A_d(N_*)|`.
    pub fn with_cap(params: AlgorithmParams, space: &KorobovSpace, cap: u64) -> Result<Self> {
        let config = LatticeConfig::new(params.modulus, space.dim())?;
        let index_set = HyperbolicCross::enumerate_with_cap(params.n_star, space, cap)?;
        Ok(Self {
            params,
            config,
            index_set,
            roots: RootTable::new(params.modulus),
        })
    }

    /// Parameters.
    pub fn params(&self) -> &AlgorithmParams {
        &self.params
    }

    /// Lattice configuration.
    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    /// `A_d(N_*)`.
    pub fn index_set(&self) -> &HyperbolicCross {
        &self.index_set
    }

    /// Roots of unity of order `N`.
    pub fn roots(&self) -> &RootTable {
        &self.roots
    }

    /// Repetition `r`: draw, evaluate `f` at the `N` nodes, estimate every
    /// coefficient of the index set.
    pub fn run_repetition<T, F>(&self, f: F, index: u64) -> RepetitionEstimate
    where
        F: Fn(&[f64]) -> T,
        T: Copy,
        Complex64: Mul<T, Output = Complex64> + Add<Complex64, Output = Complex64>,
    {
        let draw = draw_repetition(&self.config, self.params.master_seed, index);
        let values = sample_nodes(f, &self.config, &draw.z, &draw.shift);
        let coefficients = estimate_at(&values, &self.config, &draw.z, &draw.shift, &self.roots, self.index_set.iter());
        RepetitionEstimate { draw, coefficients }
    }

    /// Componentwise median across repetitions.
    ///
    /// `estimates` must hold exactly repetitions `0..R`; they are sorted by
    /// index first so the result does not depend on arrival order.
    pub fn aggregate(&self, mut estimates: Vec<RepetitionEstimate>) -> Result<MedianApproximation> {
        let r = self.params.repetitions as usize;
        estimates.sort_by_key(|e| e.draw.index);
        if estimates.len() != r || estimates.iter().enumerate().any(|(i, e)| e.draw.index != i as u64) {
            return Err(Error::InvalidArgument("aggregate needs repetitions 0..R exactly once"));
        }
        let m = self.index_set.len();
        let mut column = Vec::with_capacity(r);
        let mut coefficients = Vec::with_capacity(m);
        for i in 0..m {
            column.clear();
            column.extend(estimates.iter().map(|e| e.coefficients[i]));
            coefficients.push(complex_median(&column)?);
        }
        Ok(MedianApproximation {
            index_set: self.index_set.clone(),
            coefficients,
            params: self.params,
            draws: estimates.into_iter().map(|e| e.draw).collect(),
            eval_count: self.params.repetitions * self.params.modulus,
        })
    }

    /// Sequential run of every repetition.
    pub fn run<T, F>(&self, f: F) -> Result<MedianApproximation>
    where
        F: Fn(&[f64]) -> T,
        T: Copy,
        Complex64: Mul<T, Output = Complex64> + Add<Complex64, Output = Complex64>,
    {
        let reps = (0..self.params.repetitions).map(|r| self.run_repetition(&f, r)).collect();
        self.aggregate(reps)
    }
}

/// Builds a [`Plan`] and runs it sequentially.
pub fn run<T, F>(f: F, params: AlgorithmParams, space: &KorobovSpace) -> Result<MedianApproximation>
where
    F: Fn(&[f64]) -> T,
    T: Copy,
    Complex64: Mul<T, Output = Complex64> + Add<Complex64, Output = Complex64>,
{
    Plan::new(params, space)?.run(f)
}

/// Output of the algorithm: the index set, median coefficients and provenance.
#[derive(Debug, Clone)]
pub struct MedianApproximation {
    index_set: HyperbolicCross,
    coefficients: Vec<Complex64>,
    params: AlgorithmParams,
    draws: Vec<RepetitionDraw>,
    eval_count: u64,
}

impl MedianApproximation {
    /// `A_d(N_*)`.
    pub fn index_set(&self) -> &HyperbolicCross {
        &self.index_set
    }

    /// Coefficients in index-set order.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient at `h`, if `h` is in the index set.
    pub fn coefficient(&self, h: &[i64]) -> Option<Complex64> {
        self.index_set.position(h).map(|i| self.coefficients[i])
    }

    /// Parameters used.
    pub fn params(&self) -> &AlgorithmParams {
        &self.params
    }

    /// Per-repetition draws, ordered by repetition.
    pub fn draws(&self) -> &[RepetitionDraw] {
        &self.draws
    }

    /// Function evaluations spent, `R N`.
    pub fn eval_count(&self) -> u64 {
        self.eval_count
    }

    /// `sum_h c_h e^{2πi h·x}` split into `(real part, imaginary part)`.
    ///
    /// For real `f` the imaginary part is rounding noise.
    pub fn evaluate(&self, x: &[f64]) -> (f64, f64) {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (h, c) in self.index_set.iter().zip(&self.coefficients) {
            let mut phase = 0.0;
            for (&hj, &xj) in h.iter().zip(x) {
                phase += hj as f64 * xj;
            }
            let e = Complex64::from_polar(1.0, 2.0 * PI * crate::math::frac(phase));
            let v = c * e;
            re.add(v.re);
            im.add(v.im);
        }
        (re.value(), im.value())
    }

    /// `sum_h |c_h|`, the scale for judging the imaginary residual.
    pub fn coefficient_l1(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).sum()
    }

    /// Text form: `#key=value` header, a column header, then one row per
    /// index `h_1,...,h_d,re,im` with 17 significant digits.
    pub fn write_text<W: fmt::Write>(&self, w: &mut W) -> fmt::Result {
        let p = &self.params;
        let space = self.index_set.space();
        writeln!(w, "#N={}", p.modulus)?;
        writeln!(w, "#R={}", p.repetitions)?;
        writeln!(w, "#tau={:.16e}", p.tau)?;
        writeln!(w, "#n_star={:.16e}", p.n_star)?;
        writeln!(w, "#seed={}", p.master_seed)?;
        writeln!(w, "#d={}", space.dim())?;
        writeln!(w, "#alpha={:.16e}", space.alpha())?;
        write!(w, "#gamma=")?;
        for (j, g) in space.weights().gammas().iter().enumerate() {
            if j > 0 {
                w.write_char(';')?;
            }
            write!(w, "{g:.16e}")?;
        }
        w.write_char('\n')?;
        for j in 1..=space.dim() {
            write!(w, "h_{j},")?;
        }
        writeln!(w, "re,im")?;
        for (h, c) in self.index_set.iter().zip(&self.coefficients) {
            for hj in h {
                write!(w, "{hj},")?;
            }
            writeln!(w, "{:.16e},{:.16e}", c.re, c.im)?;
        }
        Ok(())
    }
}

/// Radius of the truncated Korobov norm used by [`EpsilonBound`].
pub const NORM_RADIUS: u32 = 1 << 12;
/// Default truncation of the aliasing tail in [`EpsilonBound::value`].
pub const DEFAULT_TAIL_RADIUS: u32 = 8;

/// Per-coefficient error scale `ε(h)`:
/// `ε(h)² = (1/τ + ln N_*) (‖f‖² / (N_*^{2α} (N-1)) + sum |f̂(ℓ+h)|²)`,
/// the sum running over nonzero `ℓ ∈ N Z^d`.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonBound<'a, F: ?Sized> {
    f: &'a F,
    params: AlgorithmParams,
    alpha: f64,
    korobov_norm_sq: f64,
}

impl<'a, F: SpectralOracle + ?Sized> EpsilonBound<'a, F> {
    /// Uses the Korobov norm truncated to `‖h‖_∞ <= 4096`.
    pub fn new(f: &'a F, params: AlgorithmParams, space: &KorobovSpace) -> Self {
        let korobov_norm_sq = f.korobov_norm_sq_truncated(space, NORM_RADIUS);
        Self::with_norm(f, params, space.alpha(), korobov_norm_sq)
    }

    /// With an explicitly supplied `‖f‖²` in the Korobov norm.
    pub fn with_norm(f: &'a F, params: AlgorithmParams, alpha: f64, korobov_norm_sq: f64) -> Self {
        Self {
            f,
            params,
            alpha,
            korobov_norm_sq,
        }
    }

    /// Korobov norm squared in use.
    pub fn korobov_norm_sq(&self) -> f64 {
        self.korobov_norm_sq
    }

    /// `sum_{0 < ‖k‖_∞ <= radius} |f̂(N k + h)|²`.
    pub fn tail(&self, h: &[i64], radius: u32) -> f64 {
        let d = h.len();
        let r = radius as i64;
        let n = self.params.modulus as i64;
        if r == 0 {
            return 0.0;
        }
        let mut k = alloc::vec![-r; d];
        let mut ell = alloc::vec![0i64; d];
        let mut acc = CompensatedSum::new();
        loop {
            if k.iter().any(|&v| v != 0) {
                for j in 0..d {
                    ell[j] = n * k[j] + h[j];
                }
                acc.add(self.f.coefficient(&ell).norm_sqr());
            }
            let mut j = 0;
            loop {
                if j == d {
                    return acc.value();
                }
                if k[j] < r {
                    k[j] += 1;
                    break;
                }
                k[j] = -r;
                j += 1;
            }
        }
    }

    /// `ε(h)²` with the tail truncated at `radius`.
    pub fn value_sq(&self, h: &[i64], radius: u32) -> f64 {
        let p = &self.params;
        let lead = 1.0 / p.tau + libm::log(p.n_star);
        let smooth = self.korobov_norm_sq / (libm::pow(p.n_star, 2.0 * self.alpha) * (p.modulus as f64 - 1.0));
        lead * (smooth + self.tail(h, radius))
    }

    /// `ε(h)` at the default tail radius.
    pub fn value(&self, h: &[i64]) -> f64 {
        libm::sqrt(self.value_sq(h, DEFAULT_TAIL_RADIUS))
    }

    /// Whether the tail has settled: relative change of `ε(h)²` between
    /// radius 4 and 8 below `1e-4`.
    pub fn tail_converged(&self, h: &[i64]) -> bool {
        let a = self.value_sq(h, 4);
        let b = self.value_sq(h, 8);
        libm::fabs(b - a) <= 1e-4 * b
    }
}

/// Outcome of a Monte-Carlo bound check for one target frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceReport {
    /// Target `h`.
    pub h: Vec<i64>,
    /// Threshold the squared error was compared against.
    pub threshold: f64,
    /// Fraction of trials with squared error above the threshold.
    pub rate: f64,
    /// Probability bound.
    pub bound: f64,
    /// True when the bound is `>= 1`, so the check says nothing.
    pub vacuous: bool,
    /// Trials run.
    pub trials: u64,
}

impl ExceedanceReport {
    /// `rate <= bound + 3 sqrt(bound (1 - bound) / trials)`; vacuous reports
    /// return `None`.
    pub fn within_bound(&self) -> Option<bool> {
        if self.vacuous {
            return None;
        }
        let p = self.bound;
        Some(self.rate <= p + 3.0 * libm::sqrt(p * (1.0 - p) / self.trials as f64))
    }
}

/// Stream index of estimate `i` in trial `t`; estimates are shared across
/// different `R` so that rates for growing `R` are comparable.
fn trial_stream(trial: u64, i: u64) -> u64 {
    (trial << 16) | i
}

/// Squared errors `|f̂_est(h) - f̂(h)|²` of single estimates for each target.
fn single_estimate_errors<F: SpectralOracle + ?Sized>(
    f: &F,
    config: &LatticeConfig,
    roots: &RootTable,
    seed: u64,
    stream_index: u64,
    targets: &[&[i64]],
) -> Vec<Complex64> {
    let draw = draw_repetition(config, seed, stream_index);
    let values = sample_nodes(|x| f.evaluate(x), config, &draw.z, &draw.shift);
    let est = estimate_at(&values, config, &draw.z, &draw.shift, roots, targets.iter().copied());
    est.into_iter().zip(targets).map(|(e, h)| e - f.coefficient(h)).collect()
}

/// Empirical exceedance `Pr(|f̂_est(h) - f̂(h)|² > ε(h)²)` over independent
/// single `(z, Δ)` estimates, against `(1+τ)/(1 + τ ln N_*)`.
pub fn verify_concentration<F: SpectralOracle + ?Sized>(
    f: &F,
    params: AlgorithmParams,
    space: &KorobovSpace,
    targets: &[&[i64]],
    trials: u64,
) -> Result<Vec<ExceedanceReport>> {
    exceedance(f, params, space, targets, 1, trials, 1.0, params.concentration_bound())
}

/// Empirical exceedance `Pr(|median - f̂(h)|² > 2 ε(h)²)` for `R`
/// repetitions, against `(4(1+τ)/(1 + τ ln N_*))^{⌈R/2⌉}`.
///
/// Trial `t` uses the estimate streams `(t, 0..R)`, so runs with larger `R`
/// extend the samples of smaller `R`.
pub fn verify_median_amplification<F: SpectralOracle + ?Sized>(
    f: &F,
    params: AlgorithmParams,
    space: &KorobovSpace,
    targets: &[&[i64]],
    repetitions: u64,
    trials: u64,
) -> Result<Vec<ExceedanceReport>> {
    exceedance(f, params, space, targets, repetitions, trials, 2.0, params.amplified_bound(repetitions))
}

#[allow(clippy::too_many_arguments)]
fn exceedance<F: SpectralOracle + ?Sized>(
    f: &F,
    params: AlgorithmParams,
    space: &KorobovSpace,
    targets: &[&[i64]],
    repetitions: u64,
    trials: u64,
    factor: f64,
    bound: f64,
) -> Result<Vec<ExceedanceReport>> {
    if repetitions.is_multiple_of(2) {
        return Err(Error::InvalidArgument("R must be odd"));
    }
    if trials == 0 || targets.is_empty() {
        return Err(Error::InvalidArgument("need at least one trial and one target"));
    }
    if repetitions >= 1 << 16 {
        return Err(Error::InvalidArgument("R must be below 65536"));
    }
    let config = LatticeConfig::new(params.modulus, space.dim())?;
    let roots = RootTable::new(params.modulus);
    let eps = EpsilonBound::new(f, params, space);
    let thresholds: Vec<f64> = targets.iter().map(|h| factor * eps.value_sq(h, DEFAULT_TAIL_RADIUS)).collect();
    let mut exceed = alloc::vec![0u64; targets.len()];
    let mut column: Vec<Vec<Complex64>> = alloc::vec![Vec::with_capacity(repetitions as usize); targets.len()];
    for t in 0..trials {
        for c in &mut column {
            c.clear();
        }
        for i in 0..repetitions {
            let errs = single_estimate_errors(f, &config, &roots, params.master_seed, trial_stream(t, i), targets);
            for (c, e) in column.iter_mut().zip(errs) {
                c.push(e);
            }
        }
        for ((c, thr), count) in column.iter().zip(&thresholds).zip(&mut exceed) {
            // median of errors equals median estimate minus the true value
            if complex_median(c)?.norm_sqr() > *thr {
                *count += 1;
            }
        }
    }
    Ok(targets
        .iter()
        .zip(thresholds)
        .zip(exceed)
        .map(|((h, threshold), count)| ExceedanceReport {
            h: h.to_vec(),
            threshold,
            rate: count as f64 / trials as f64,
            bound,
            vacuous: bound >= 1.0,
            trials,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::korobov::{test_function_f2, FrequencyIndex, TrigPolynomial};
    use alloc::string::String;
    use alloc::vec;
    use core::f64::consts::E;

    #[test]
    fn median_examples() {
        let v = Complex64::new(0.3, -2.0);
        assert_eq!(complex_median(&[v]).unwrap(), v);
        let xs = [Complex64::new(1.0, 1.0), Complex64::new(2.0, 3.0), Complex64::new(5.0, 2.0)];
        assert_eq!(complex_median(&xs).unwrap(), Complex64::new(2.0, 2.0));
        let ys = [xs[2], xs[0], xs[1]];
        assert_eq!(complex_median(&ys).unwrap(), Complex64::new(2.0, 2.0));
        assert!(complex_median(&[]).is_err());
        assert!(complex_median(&xs[..2]).is_err());
    }

    #[test]
    fn pn_and_nstar() {
        let s1 = KorobovSpace::with(1.5, &[1.0]).unwrap();
        assert!((compute_pn(1.0, &s1, 2) - (1.0 + 2.0 * (1.0 + 2f64.ln()))).abs() < 1e-14);
        let g = 0.3;
        let a = KorobovSpace::with(1.5, &[g]).unwrap();
        let b = KorobovSpace::with(1.5, &[g, g]).unwrap();
        let pa = compute_pn(0.7, &a, 1009);
        assert!((compute_pn(0.7, &b, 1009) - pa * pa).abs() < 1e-12 * pa * pa);
        let s2 = KorobovSpace::with(1.5, &[1.0, 1.0]).unwrap();
        let direct = 100.0 / (E * (1.0 + 2.0 * (1.0 + 101f64.ln())).powi(2));
        assert!((compute_nstar(1.0, &s2, 101) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn params_validation() {
        let s = KorobovSpace::with(1.5, &[1.0]).unwrap();
        assert!(AlgorithmParams::new(10_007, 3, 1.0, 0, &s).is_ok());
        assert!(AlgorithmParams::new(10_007, 2, 1.0, 0, &s).is_err());
        assert!(AlgorithmParams::new(10_008, 3, 1.0, 0, &s).is_err());
        assert!(matches!(AlgorithmParams::new(101, 3, 1.0, 0, &KorobovSpace::with(1.5, &[1.0, 1.0]).unwrap()), Err(Error::BudgetTooSmall(_))));
    }

    fn setup() -> (KorobovSpace, AlgorithmParams) {
        let s = KorobovSpace::with(1.5, &[1.0, 1.0]).unwrap();
        let p = AlgorithmParams::new(100_003, 5, 2.0, 11, &s).unwrap();
        (s, p)
    }

    #[test]
    fn zero_function_gives_zero() {
        let (s, p) = setup();
        let a = run(|_| 0.0, p, &s).unwrap();
        assert!(a.coefficients().iter().all(|c| *c == Complex64::new(0.0, 0.0)));
        assert_eq!(a.eval_count(), 5 * 100_003);
    }

    #[test]
    fn cosine_pair_recovered() {
        let (s, p) = setup();
        let plan = Plan::new(p, &s).unwrap();
        let last = plan.index_set().get(plan.index_set().len() - 1).to_vec();
        let f = TrigPolynomial::cosine_pair(FrequencyIndex(last.clone()));
        let a = plan.run(|x| f.evaluate(x)).unwrap();
        let neg: Vec<i64> = last.iter().map(|v| -v).collect();
        assert!((a.coefficient(&last).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!((a.coefficient(&neg).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn aggregate_is_order_independent_and_checked() {
        let (s, p) = setup();
        let plan = Plan::new(p, &s).unwrap();
        let f = test_function_f2(2);
        let mut reps: Vec<_> = (0..5).map(|r| plan.run_repetition(|x| f.evaluate(x), r)).collect();
        let a = plan.aggregate(reps.clone()).unwrap();
        reps.reverse();
        let b = plan.aggregate(reps.clone()).unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
        reps.pop();
        assert!(plan.aggregate(reps).is_err());
        // conjugate symmetry of the median coefficients
        for (h, c) in a.index_set().iter().zip(a.coefficients()) {
            let neg: Vec<i64> = h.iter().map(|v| -v).collect();
            assert!((a.coefficient(&neg).unwrap() - c.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn evaluation_edge_cases() {
        let s = KorobovSpace::with(1.5, &[1.0]).unwrap();
        let p = AlgorithmParams::new(10_007, 1, 1.0, 3, &s).unwrap();
        let a = run(|_| 2.5, p, &s).unwrap();
        let (re, im) = a.evaluate(&[0.123]);
        assert!((re - 2.5).abs() < 1e-12);
        assert!(im.abs() <= 1e-9 * a.coefficient_l1());
    }

    #[test]
    fn text_output_layout() {
        let s = KorobovSpace::with(1.5, &[1.0]).unwrap();
        let p = AlgorithmParams::new(10_007, 1, 1.0, 3, &s).unwrap();
        let a = run(|_| 1.0, p, &s).unwrap();
        let mut out = String::new();
        a.write_text(&mut out).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "#N=10007");
        assert_eq!(lines[8], "h_1,re,im");
        assert_eq!(lines.len(), 9 + a.index_set().len());
        assert!(!out.contains('\r'));
    }

    #[test]
    fn epsilon_empty_tail() {
        let s = KorobovSpace::with(1.5, &[1.0, 1.0]).unwrap();
        let p = AlgorithmParams::new(100_003, 1, 2.0, 0, &s).unwrap();
        let f = TrigPolynomial::cosine_pair(FrequencyIndex(vec![1, 2]));
        let eps = EpsilonBound::new(&f, p, &s);
        let knorm = eps.korobov_norm_sq();
        assert!((knorm - 2.0 * 8.0).abs() < 1e-12);
        let expected = (0.5 + p.n_star().ln()) * knorm / (p.n_star().powf(3.0) * 100_002.0);
        assert!((eps.value_sq(&[1, 2], 8) - expected).abs() < 1e-14 * expected);
        assert_eq!(eps.tail(&[1, 2], 0), 0.0);
    }

    #[test]
    fn epsilon_tail_is_monotone_and_settles() {
        let s = KorobovSpace::with(2.5, &[1.0, 1.0]).unwrap();
        let p = AlgorithmParams::new(100_003, 1, 2.0, 0, &s).unwrap();
        let f = test_function_f2(2);
        let eps = EpsilonBound::new(&f, p, &s);
        let mut prev = 0.0;
        for r in 0..=8 {
            let v = eps.value_sq(&[0, 0], r);
            assert!(v >= prev);
            prev = v;
        }
        assert!(eps.tail_converged(&[0, 0]));
    }

    #[test]
    fn single_mode_never_fails() {
        let s = KorobovSpace::with(1.5, &[1.0, 1.0]).unwrap();
        let p = AlgorithmParams::new(100_003, 3, 2.0, 4, &s).unwrap();
        let f = TrigPolynomial::cosine_pair(FrequencyIndex(vec![2, -1]));
        let rep = verify_concentration(&f, p, &s, &[&[2, -1]], 10).unwrap();
        assert_eq!(rep[0].rate, 0.0);
    }
}
