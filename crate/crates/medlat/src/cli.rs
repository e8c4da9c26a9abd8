//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;
use medlat_core::convergence::fit_rate;
use medlat_core::params::{RepetitionRule, WeightSequence};

use crate::experiment::{error_points, nstar_table, run_experiment, ExperimentConfig, TestFunction, NSTAR_TABLE_EXPONENTS};
use crate::records::{write_csv, write_nstar_table};
use crate::svg;
use crate::{Error, Result};

/// Median lattice L2-approximation experiments.
#[derive(Debug, Clone, Parser)]
#[command(name = "medlat", version)]
pub struct Args {
    /// Test function: f1, f2, or exp:h1;h2;... for a cosine pair.
    #[arg(long, default_value = "f2")]
    pub function: String,
    /// Smoothness; defaults to 3/2 for f1 and 5/2 for f2.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Weights as a comma list, or poly:BETA for j^-BETA.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Dimension; ignored when the weights are an explicit list.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Failure probability.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Budget exponents k, for M_max = 2^k, as a comma list.
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<u32>>,
    /// Master seed.
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Runs per budget.
    #[arg(long, default_value_t = 1)]
    pub runs: u32,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Run budgets concurrently; output is unchanged.
    #[arg(long)]
    pub parallel_budgets: bool,
    /// Record wall time per run (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Choose R from the concentration window instead of the budget.
    #[arg(long)]
    pub window_r: bool,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// 1: error vs M, 2: error vs N_*, 3: N_* vs M (no evaluations).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub fig: u8,
    /// Also write an SVG plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn parse_gammas(spec: Option<&str>, dim: Option<usize>, default_dim: usize) -> Result<Vec<f64>> {
    let d = dim.unwrap_or(default_dim);
    match spec {
        None => Ok(vec![1.0; d]),
        Some(s) => {
            if let Some(beta) = s.strip_prefix("poly:") {
                let beta: f64 = beta.parse().map_err(|e| Error::Parse(format!("poly exponent {beta:?}: {e}")))?;
                if !(beta > 0.0 && beta.is_finite()) {
                    return Err(Error::Config(format!("poly exponent must be positive, got {beta}")));
                }
                Ok((1..=d).map(|j| WeightSequence::Poly { beta }.gamma(j)).collect())
            } else {
                let g = s
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("weight {t:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                if dim.is_some_and(|d| d != g.len()) {
                    return Err(Error::Config(format!("--dim {d} but {} weights given", g.len())));
                }
                Ok(g)
            }
        }
    }
}

impl Args {
    /// The experiment configuration described by the flags.
    pub fn config(&self) -> Result<ExperimentConfig> {
        let function: TestFunction = self.function.parse()?;
        let mut c = ExperimentConfig::new(function.clone());
        let default_dim = c.dim();
        if let TestFunction::ExpMode(h) = &function {
            if self.dim.is_some_and(|d| d != h.len()) {
                return Err(Error::Config("--dim disagrees with the mode".into()));
            }
        }
        c.gammas = parse_gammas(self.gamma.as_deref(), self.dim, default_dim)?;
        if let Some(a) = self.alpha {
            c.alpha = a;
        }
        c.delta = self.delta;
        if let Some(b) = &self.budgets {
            c.budgets = b
                .iter()
                .map(|&k| 1u64.checked_shl(k).filter(|_| k < 64).ok_or_else(|| Error::Config(format!("budget exponent {k} too large"))))
                .collect::<Result<_>>()?;
        } else if self.fig == 3 {
            c.budgets = NSTAR_TABLE_EXPONENTS.map(|k| 1u64 << k).collect();
        }
        c.seed = self.seed;
        c.runs = self.runs;
        c.threads = self.threads;
        c.parallel_budgets = self.parallel_budgets;
        c.timing = self.timing;
        if self.window_r {
            c.rule = RepetitionRule::Window;
        }
        // fail early on bad weights or smoothness
        c.space()?;
        Ok(c)
    }
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs the command described by `args`.
pub fn execute(args: &Args) -> Result<()> {
    let config = args.config()?;
    let mut out = sink(args.out.as_ref())?;
    if args.fig == 3 {
        let rows = nstar_table(&config, &config.budgets)?;
        write_nstar_table(&rows, &mut out)?;
        out.flush()?;
        if let Some(p) = &args.svg {
            let pts = rows.iter().filter(|r| r.n_star > 0.0).map(|r| (r.total_evals as f64, r.n_star)).collect();
            std::fs::write(p, svg::nstar_vs_budget(pts).render())?;
        }
        return Ok(());
    }
    let result = run_experiment(&config)?;
    write_csv(&result, &mut out)?;
    out.flush()?;

    let against_n_star = args.fig == 2;
    let pts = error_points(&result.records, against_n_star);
    let axis = if against_n_star { "N_*" } else { "M" };
    match fit_rate(&pts) {
        Ok(fit) => eprintln!("slope vs {axis}: {:.4} (R^2 = {:.4})", fit.slope, fit.r_squared),
        Err(e) => eprintln!("no rate fit: {e}"),
    }
    if let Some(p) = &args.svg {
        let name = config.function.to_string();
        let plot = if against_n_star {
            svg::error_vs_nstar(pts, config.alpha, &name)
        } else {
            svg::error_vs_budget(pts, config.alpha, &name)
        };
        std::fs::write(p, plot.render())?;
    }
    Ok(())
}
