//! Parallel execution of the repetitions of one run.

use medlat_core::median_approx::{MedianApproximation, Plan};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::Result;

/// Builds a pool with `threads` workers, or rayon's default when `None`.
pub fn pool(threads: Option<usize>) -> Result<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// Runs every repetition of `plan` on `pool` and reduces by median.
///
/// Results are collected in repetition order, so the output is bit-identical
/// for any number of workers.
pub fn run_parallel<F>(plan: &Plan, f: F, pool: &ThreadPool) -> Result<MedianApproximation>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let r = plan.params().repetitions();
    let reps = pool.install(|| (0..r).into_par_iter().map(|i| plan.run_repetition(&f, i)).collect());
    Ok(plan.aggregate(reps)?)
}
