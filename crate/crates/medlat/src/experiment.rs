//! Budget sweeps: parameter selection, a run of the algorithm per seed, and
//! the exact squared L2 error of each run.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use medlat_core::convergence::exact_squared_error;
use medlat_core::korobov::{test_function_f1, test_function_f2, FrequencyIndex, KorobovSpace, SpectralOracle, TrigPolynomial};
use medlat_core::lattice::derive_seed;
use medlat_core::median_approx::{AlgorithmParams, Plan};
use medlat_core::params::{check_conditions, select_params, BudgetSpec, ConditionReport, RepetitionRule, SelectedParams};

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::runner::{pool, run_parallel};
use crate::{Error, Result};

/// Built-in test functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestFunction {
    /// Product of kinked quadratics, unit L2 norm.
    F1,
    /// Product of `(x - 1/2)² sin(2πx - π)`.
    F2,
    /// `2 cos(2π h₀·x)`, the sum of the modes `±h₀`.
    ExpMode(Vec<i64>),
}

impl TestFunction {
    /// Smoothness used by default for this function.
    pub fn default_alpha(&self) -> f64 {
        match self {
            Self::F1 => 1.5,
            Self::F2 => 2.5,
            Self::ExpMode(_) => 1.5,
        }
    }

    /// The spectral oracle in dimension `dim`.
    pub fn oracle(&self, dim: usize) -> Result<Box<dyn SpectralOracle>> {
        Ok(match self {
            Self::F1 => Box::new(test_function_f1(dim)),
            Self::F2 => Box::new(test_function_f2(dim)),
            Self::ExpMode(h) => {
                if h.len() != dim {
                    return Err(Error::Config(format!("mode has {} entries, dimension is {dim}", h.len())));
                }
                Box::new(TrigPolynomial::cosine_pair(FrequencyIndex(h.clone())))
            }
        })
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::F1 => f.write_str("f1"),
            Self::F2 => f.write_str("f2"),
            Self::ExpMode(h) => {
                f.write_str("exp:")?;
                for (i, v) in h.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `f1`, `f2`, or `exp:h1;h2;...`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(Self::F1),
            "f2" => Ok(Self::F2),
            _ => {
                let rest = s
                    .strip_prefix("exp:")
                    .ok_or_else(|| Error::Parse(format!("unknown function {s:?}")))?;
                let h = rest
                    .split([';', ','])
                    .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("mode {t:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::ExpMode(h))
            }
        }
    }
}

/// Everything needed to reproduce a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Test function.
    pub function: TestFunction,
    /// Smoothness `α`.
    pub alpha: f64,
    /// Weights `γ_1..γ_d`.
    pub gammas: Vec<f64>,
    /// Failure probability `δ`.
    pub delta: f64,
    /// Budgets `M_max`.
    pub budgets: Vec<u64>,
    /// Master seed.
    pub seed: u64,
    /// Independent runs per budget.
    pub runs: u32,
    /// Rule for `R`.
    pub rule: RepetitionRule,
    /// Worker threads for the repetitions; `None` uses all cores.
    pub threads: Option<usize>,
    /// Process budgets concurrently on the same pool. Seeds are derived per
    /// budget, so the output does not change.
    pub parallel_budgets: bool,
    /// Record wall time per run. Off by default because timings make the
    /// output non-reproducible.
    pub timing: bool,
}

impl ExperimentConfig {
    /// Defaults for `function` in dimension 2 with unit weights: `δ = 0.01`,
    /// budgets `2^10..=2^18`, one run, the budget rule for `R`.
    pub fn new(function: TestFunction) -> Self {
        let dim = match &function {
            TestFunction::ExpMode(h) => h.len(),
            _ => 2,
        };
        Self {
            alpha: function.default_alpha(),
            function,
            gammas: vec![1.0; dim],
            delta: 0.01,
            budgets: (10..=18).map(|k| 1u64 << k).collect(),
            seed: 20_240_601,
            runs: 1,
            rule: RepetitionRule::Budget,
            threads: None,
            parallel_budgets: false,
            timing: false,
        }
    }

    /// `d`.
    pub fn dim(&self) -> usize {
        self.gammas.len()
    }

    /// The Korobov space of the configuration.
    pub fn space(&self) -> Result<KorobovSpace> {
        Ok(KorobovSpace::with(self.alpha, &self.gammas)?)
    }
}

/// Seed of run `run` at budget `max_evals`, derived from the master seed.
pub fn run_seed(master: u64, max_evals: u64, run: u32) -> u64 {
    derive_seed(derive_seed(master, max_evals), run as u64)
}

/// One row of the output: a run at one budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    /// `M_max`.
    pub max_evals: u64,
    /// Run index.
    pub run: u32,
    /// Seed used by the run.
    pub seed: u64,
    /// `N`.
    pub modulus: u64,
    /// `R`.
    pub repetitions: u64,
    /// `M = N R`.
    pub total_evals: u64,
    /// `τ_*`.
    pub tau_star: f64,
    /// `N_*`.
    pub n_star: f64,
    /// Whether the feasibility check of the parameter selection passed.
    pub feasible: bool,
    /// `|A_d(N_*)|`; empty when `N_* < 1` and nothing was run.
    pub index_set_size: Option<u64>,
    /// Exact squared L2 error; empty when nothing was run.
    pub squared_l2_error: Option<f64>,
    /// Function evaluations counted during the run.
    pub eval_count: Option<u64>,
    /// Seconds, when timing is enabled.
    pub wall_time: Option<f64>,
}

/// Parameter selection of one budget with its condition report.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetSummary {
    /// Selection.
    pub selected: SelectedParams,
    /// Conditions at the selected parameters.
    pub conditions: ConditionReport,
}

/// Output of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    /// Configuration used.
    pub config: ExperimentConfig,
    /// One summary per budget, in budget order.
    pub budgets: Vec<BudgetSummary>,
    /// One record per (budget, run).
    pub records: Vec<ExperimentRecord>,
}

/// Runs the sweep.
///
/// Every budget runs whenever `N_* >= 1`, even if the feasibility check
/// fails; `feasible` records the check. Budgets with `N_* < 1` yield rows
/// with empty error fields.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    if config.runs == 0 {
        return Err(Error::Config("runs must be >= 1".into()));
    }
    let space = config.space()?;
    let oracle = config.function.oracle(config.dim())?;
    let workers = pool(config.threads)?;
    let one = |m: u64| run_budget(config, m, &space, oracle.as_ref(), &workers);
    let per_budget: Vec<(BudgetSummary, Vec<ExperimentRecord>)> = if config.parallel_budgets {
        workers.install(|| config.budgets.par_iter().map(|&m| one(m)).collect::<Result<_>>())?
    } else {
        config.budgets.iter().map(|&m| one(m)).collect::<Result<_>>()?
    };
    let (budgets, records): (Vec<_>, Vec<_>) = per_budget.into_iter().unzip();
    Ok(ExperimentOutput {
        config: config.clone(),
        budgets,
        records: records.into_iter().flatten().collect(),
    })
}

fn run_budget(
    config: &ExperimentConfig,
    m: u64,
    space: &KorobovSpace,
    oracle: &dyn SpectralOracle,
    workers: &ThreadPool,
) -> Result<(BudgetSummary, Vec<ExperimentRecord>)> {
    let selected = select_params(&BudgetSpec::new(m, config.delta)?, space, config.rule)?;
    let conditions = check_conditions(selected.modulus, selected.repetitions, selected.tau_star, config.delta, space);
    let mut records = Vec::with_capacity(config.runs as usize);
    for run in 0..config.runs {
        let seed = run_seed(config.seed, m, run);
        let mut rec = ExperimentRecord {
            max_evals: m,
            run,
            seed,
            modulus: selected.modulus,
            repetitions: selected.repetitions,
            total_evals: selected.total_evals(),
            tau_star: selected.tau_star,
            n_star: selected.n_star,
            feasible: selected.feasible(),
            index_set_size: None,
            squared_l2_error: None,
            eval_count: None,
            wall_time: None,
        };
        if selected.n_star >= 1.0 {
            let start = Instant::now();
            let params = AlgorithmParams::new(selected.modulus, selected.repetitions, selected.tau_star, seed, space)?;
            let plan = Plan::new(params, space)?;
            let calls = AtomicU64::new(0);
            let approx = run_parallel(
                &plan,
                |x| {
                    calls.fetch_add(1, Ordering::Relaxed);
                    oracle.evaluate(x)
                },
                workers,
            )?;
            rec.index_set_size = Some(plan.index_set().len() as u64);
            rec.squared_l2_error = Some(exact_squared_error(oracle, &approx)?);
            rec.eval_count = Some(calls.load(Ordering::Relaxed));
            if config.timing {
                rec.wall_time = Some(start.elapsed().as_secs_f64());
            }
        }
        records.push(rec);
    }
    Ok((BudgetSummary { selected, conditions }, records))
}

/// `(M_max, N, R, M, N_*)` for each budget, from parameter selection alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NstarRow {
    /// `M_max`.
    pub max_evals: u64,
    /// `N`.
    pub modulus: u64,
    /// `R`.
    pub repetitions: u64,
    /// `M = N R`.
    pub total_evals: u64,
    /// `N_*`.
    pub n_star: f64,
}

/// Default budget exponents for the `N_*` versus `M` table.
pub const NSTAR_TABLE_EXPONENTS: std::ops::RangeInclusive<u32> = 10..=40;

/// The `N_*` versus `M` table over `budgets` (no function evaluations).
pub fn nstar_table(config: &ExperimentConfig, budgets: &[u64]) -> Result<Vec<NstarRow>> {
    let space = config.space()?;
    budgets
        .iter()
        .map(|&m| {
            let s = select_params(&BudgetSpec::new(m, config.delta)?, &space, config.rule)?;
            Ok(NstarRow {
                max_evals: m,
                modulus: s.modulus,
                repetitions: s.repetitions,
                total_evals: s.total_evals(),
                n_star: s.n_star,
            })
        })
        .collect()
}

/// `(x, error)` pairs from rows that were run; `x` is `M` or `N_*`.
pub fn error_points(records: &[ExperimentRecord], against_n_star: bool) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| {
            let e = r.squared_l2_error?;
            let x = if against_n_star { r.n_star } else { r.total_evals as f64 };
            Some((x, e.sqrt()))
        })
        .collect()
}
