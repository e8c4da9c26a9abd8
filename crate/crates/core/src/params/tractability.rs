//! Dimension dependence of `P_N` under the choice `τ = η / G_d`.

use alloc::vec::Vec;

use crate::index_set::log_p_factor;
use crate::korobov::{KorobovSpace, ProductWeights, SmoothnessParams};
use crate::math::{zeta, CompensatedSum};
use crate::{Error, Result};

/// Sample depth used when a sequence has no closed-form tail.
pub const SAMPLE_DEPTH: usize = 100_000;

/// An infinite weight sequence `γ_1 >= γ_2 >= ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSequence {
    /// `γ_j = c` for all `j`.
    Constant(f64),
    /// `γ_j = j^{-β}`.
    Poly {
        /// Decay exponent `β > 0`.
        beta: f64,
    },
    /// Explicit values; the sequence is taken to be zero past the end.
    Sampled(Vec<f64>),
}

impl WeightSequence {
    /// `γ_j` for `j >= 1`.
    pub fn gamma(&self, j: usize) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Poly { beta } => libm::pow(j as f64, -beta),
            Self::Sampled(v) => v.get(j - 1).copied().unwrap_or(0.0),
        }
    }

    /// First `dim` weights.
    pub fn truncate(&self, dim: usize) -> Result<ProductWeights> {
        ProductWeights::new((1..=dim).map(|j| self.gamma(j)).collect())
    }

    /// `G_d = 2 sum_{j<=d} γ_j^{1/(2α)}`.
    pub fn g_d(&self, alpha: f64, dim: usize) -> f64 {
        let s: CompensatedSum = (1..=dim).map(|j| libm::pow(self.gamma(j), 0.5 / alpha)).collect();
        2.0 * s.value()
    }

    /// `G_∞`, or `None` when the sum diverges.
    ///
    /// Closed forms are used where available; sampled sequences are summed
    /// over their stored values.
    pub fn g_infinity(&self, alpha: f64) -> Option<f64> {
        match self {
            Self::Constant(_) => None,
            Self::Poly { beta } => {
                let q = beta / (2.0 * alpha);
                zeta(q).ok().map(|z| 2.0 * z)
            }
            Self::Sampled(v) => Some(self.g_d(alpha, v.len().min(SAMPLE_DEPTH))),
        }
    }
}

/// Growth class of `G_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TractabilityCase {
    /// `G_∞ < ∞`: bounds independent of `d`.
    Summable {
        /// `G_∞`.
        g_infinity: f64,
    },
    /// `G_d <= D ln d` on the probe grid.
    Logarithmic {
        /// Fitted constant `D`.
        d_const: f64,
    },
    /// Neither.
    Neither,
}

/// Diagnostics for the `τ = η/G_d` choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TractabilityReport {
    /// `G_d`.
    pub g_d: f64,
    /// `τ = η / G_d`.
    pub tau: f64,
    /// Growth class.
    pub case: TractabilityCase,
}

const PROBE_DIMS: [usize; 4] = [100, 1_000, 10_000, 100_000];

fn classify(seq: &WeightSequence, alpha: f64) -> TractabilityCase {
    if let Some(g) = seq.g_infinity(alpha) {
        return TractabilityCase::Summable { g_infinity: g };
    }
    // G_d / ln d must stop growing across the probe grid
    let ratios: Vec<f64> = PROBE_DIMS
        .iter()
        .map(|&d| seq.g_d(alpha, d) / libm::log(d as f64))
        .collect();
    let last = ratios[ratios.len() - 1];
    let prev = ratios[ratios.len() - 2];
    if last <= prev * 1.05 {
        TractabilityCase::Logarithmic {
            d_const: ratios.iter().copied().fold(0.0, f64::max),
        }
    } else {
        TractabilityCase::Neither
    }
}

/// Computes `G_d`, `τ = η/G_d` and the growth class of the weights.
pub fn tractability_diagnostics(seq: &WeightSequence, alpha: f64, dim: usize, eta: f64) -> Result<TractabilityReport> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument("eta must lie in (0, 1)"));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1"));
    }
    let g_d = seq.g_d(alpha, dim);
    Ok(TractabilityReport {
        g_d,
        tau: eta / g_d,
        case: classify(seq, alpha),
    })
}

/// Both sides of `ln P_N(η/G_d, d, γ) <= G_d + η ln N`.
pub fn tractability_inequality(seq: &WeightSequence, alpha: f64, dim: usize, eta: f64, modulus: u64) -> Result<(f64, f64)> {
    let space = KorobovSpace::new(SmoothnessParams::new(alpha, dim)?, &seq.truncate(dim)?)?;
    let g_d = seq.g_d(alpha, dim);
    let lhs = log_p_factor(eta / g_d, modulus as f64, &space);
    let rhs = g_d + eta * libm::log(modulus as f64);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_g_infinity() {
        // γ_j = j^{-3}, α = 1: 2 ζ(3/2)
        let g = WeightSequence::Poly { beta: 3.0 }.g_infinity(1.0).unwrap();
        assert!((g - 5.224_750_697_370_977).abs() < 1e-12);
        // direct partial sum approaches from below
        let direct = WeightSequence::Poly { beta: 3.0 }.g_d(1.0, 100_000);
        assert!(direct < g && g - direct < 2.0 * 2.0 / libm::sqrt(100_000.0));
    }

    #[test]
    fn constant_weights_are_neither() {
        let r = tractability_diagnostics(&WeightSequence::Constant(1.0), 1.5, 10, 0.5).unwrap();
        assert_eq!(r.g_d, 20.0);
        assert_eq!(r.tau, 0.025);
        assert_eq!(r.case, TractabilityCase::Neither);
    }

    #[test]
    fn borderline_weights_are_logarithmic() {
        // γ_j = j^{-2α}: G_d = 2 H_d ~ 2 ln d
        let r = tractability_diagnostics(&WeightSequence::Poly { beta: 2.0 }, 1.0, 5, 0.1).unwrap();
        match r.case {
            TractabilityCase::Logarithmic { d_const } => assert!(d_const > 2.0 && d_const < 3.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inequality_holds_on_examples() {
        for beta in [1.0, 2.0, 3.0] {
            for eta in [0.1, 0.5] {
                let (l, r) = tractability_inequality(&WeightSequence::Poly { beta }, 1.5, 50, eta, 999_983).unwrap();
                assert!(l <= r);
            }
        }
    }

    #[test]
    fn eta_validation() {
        assert!(tractability_diagnostics(&WeightSequence::Constant(1.0), 1.0, 3, 1.0).is_err());
        assert!(tractability_diagnostics(&WeightSequence::Constant(1.0), 1.0, 0, 0.5).is_err());
    }
}
