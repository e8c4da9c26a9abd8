//! Randomly shifted rank-1 lattice rules with random generating vectors.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul};

use num_complex::Complex64;
use rand::distr::{Distribution, Uniform};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::index_set::HyperbolicCross;
use crate::math::frac;
use crate::params::is_prime;
use crate::{Error, Result};

/// Prime lattice size `N` and dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeConfig {
    modulus: u64,
    dim: usize,
}

impl LatticeConfig {
    /// `N` must be prime (hence `>= 2`) and `d >= 1`.
    pub fn new(modulus: u64, dim: usize) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1"));
        }
        Ok(Self { modulus, dim })
    }

    /// `N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Generating vector with `1 <= z_j <= N - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingVector(Vec<u64>);

impl GeneratingVector {
    /// Validates the component range against `config`.
    pub fn new(z: Vec<u64>, config: &LatticeConfig) -> Result<Self> {
        if z.len() != config.dim {
            return Err(Error::DimensionMismatch {
                expected: config.dim,
                actual: z.len(),
            });
        }
        if z.iter().any(|&zj| zj == 0 || zj >= config.modulus) {
            return Err(Error::InvalidArgument("generating vector components must lie in 1..N"));
        }
        Ok(Self(z))
    }

    /// Components.
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

/// Shift `Δ ∈ [0,1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomShift(Vec<f64>);

impl RandomShift {
    /// Validates `0 <= Δ_j < 1`.
    pub fn new(delta: Vec<f64>) -> Result<Self> {
        if delta.iter().any(|&x| !(0.0..1.0).contains(&x)) {
            return Err(Error::InvalidArgument("shift components must lie in [0, 1)"));
        }
        Ok(Self(delta))
    }

    /// The zero shift.
    pub fn zero(dim: usize) -> Self {
        Self(alloc::vec![0.0; dim])
    }

    /// Components.
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// What a random stream is used for; part of the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    /// Generating vector draws.
    GeneratingVector = 1,
    /// Shift draws.
    Shift = 2,
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mixes a master seed with an index into a derived 64-bit seed.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// Counter-based ChaCha8 stream keyed by `(master_seed, index, purpose)`.
///
/// Streams for different keys are independent and do not depend on the
/// order in which they are created.
pub fn stream(master_seed: u64, index: u64, purpose: StreamPurpose) -> ChaCha8Rng {
    let base = derive_seed(master_seed, index);
    let mut seed = [0u8; 32];
    let mut s = base;
    for chunk in seed.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// Draws `z` uniformly from `{1, ..., N-1}^d` (unbiased integer sampling).
pub fn draw_generating_vector<R: Rng + ?Sized>(config: &LatticeConfig, rng: &mut R) -> GeneratingVector {
    let dist = Uniform::new(1u64, config.modulus).expect("N >= 2");
    GeneratingVector((0..config.dim).map(|_| dist.sample(rng)).collect())
}

/// Draws `Δ` uniformly from `[0,1)^d` with 53-bit resolution.
pub fn draw_shift<R: Rng + ?Sized>(config: &LatticeConfig, rng: &mut R) -> RandomShift {
    RandomShift(
        (0..config.dim)
            .map(|_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
            .collect(),
    )
}

/// Writes node `k`, `{k z / N + Δ}`, into `out`.
pub fn node(config: &LatticeConfig, z: &GeneratingVector, shift: &RandomShift, k: u64, out: &mut [f64]) {
    let n = config.modulus as u128;
    let nf = config.modulus as f64;
    for ((o, &zj), &dj) in out.iter_mut().zip(&z.0).zip(&shift.0) {
        let r = (k as u128 * zj as u128 % n) as f64;
        *o = frac(r / nf + dj);
    }
}

/// Evaluates `f` once at each of the `N` shifted lattice nodes.
pub fn sample_nodes<T, F>(f: F, config: &LatticeConfig, z: &GeneratingVector, shift: &RandomShift) -> Vec<T>
where
    F: Fn(&[f64]) -> T,
{
    let mut x = alloc::vec![0.0; config.dim];
    (0..config.modulus)
        .map(|k| {
            node(config, z, shift, k, &mut x);
            f(&x)
        })
        .collect()
}

/// Table of `exp(-2πi t / N)` for `t = 0..N`.
///
/// Built by repeated multiplication with the primitive root, re-anchored
/// with an exact `sin`/`cos` evaluation every 1024 steps.
#[derive(Debug, Clone)]
pub struct RootTable {
    roots: Vec<Complex64>,
}

const REANCHOR: u64 = 1024;

impl RootTable {
    /// Roots of unity for modulus `n >= 1`.
    pub fn new(n: u64) -> Self {
        let nf = n as f64;
        let exact = |t: u64| Complex64::from_polar(1.0, -2.0 * PI * (t as f64) / nf);
        let step = exact(1);
        let mut roots = Vec::with_capacity(n as usize);
        let mut cur = Complex64::new(1.0, 0.0);
        for t in 0..n {
            if t % REANCHOR == 0 {
                cur = exact(t);
            }
            roots.push(cur);
            cur *= step;
        }
        Self { roots }
    }

    /// `N`.
    pub fn modulus(&self) -> u64 {
        self.roots.len() as u64
    }

    /// `exp(-2πi t / N)` for `t < N`.
    #[inline]
    pub fn get(&self, t: u64) -> Complex64 {
        self.roots[t as usize]
    }
}

/// `h·z mod N` in `[0, N)`, with 128-bit intermediates.
pub fn dot_mod(h: &[i64], z: &[u64], modulus: u64) -> u64 {
    let n = modulus as i128;
    let mut acc: i128 = 0;
    for (&hj, &zj) in h.iter().zip(z) {
        acc = (acc + (hj as i128).rem_euclid(n) * zj as i128) % n;
    }
    acc as u64
}

/// True iff `z·ℓ ≡ 0 (mod N)`, i.e. `ℓ` lies in the dual lattice.
pub fn dual_membership(ell: &[i64], config: &LatticeConfig, z: &GeneratingVector) -> bool {
    dot_mod(ell, &z.0, config.modulus) == 0
}

/// `exp(-2πi h·Δ)`, with the phase reduced mod 1 before the trigonometry.
fn shift_phase(h: &[i64], shift: &RandomShift) -> Complex64 {
    let mut theta = 0.0;
    for (&hj, &dj) in h.iter().zip(&shift.0) {
        theta = frac(theta + frac(hj as f64 * dj));
    }
    Complex64::from_polar(1.0, -2.0 * PI * theta)
}

// kept outside the generic estimator, whose `Mul<T>` bound hides `Mul<Complex64>`
fn scale(acc: Complex64, phase: Complex64, inv_n: f64) -> Complex64 {
    acc * phase * inv_n
}

/// Shifted-lattice estimates of `f̂(h)` for a list of frequencies.
///
/// `values[k]` must hold `f({k z / N + Δ})`. For each `h` the phase at node
/// `k` is `exp(-2πi [k m / N + h·Δ])` with `m = h·z mod N`, so the estimate
/// is `exp(-2πi h·Δ) / N · sum_k values[k] ω^{k m mod N}`.
pub fn estimate_at<'a, T, I>(
    values: &[T],
    config: &LatticeConfig,
    z: &GeneratingVector,
    shift: &RandomShift,
    roots: &RootTable,
    targets: I,
) -> Vec<Complex64>
where
    T: Copy,
    Complex64: Mul<T, Output = Complex64> + Add<Complex64, Output = Complex64>,
    I: IntoIterator<Item = &'a [i64]>,
{
    let n = config.modulus;
    debug_assert_eq!(values.len() as u64, n);
    debug_assert_eq!(roots.modulus(), n);
    let inv_n = 1.0 / n as f64;
    targets
        .into_iter()
        .map(|h| {
            let m = dot_mod(h, &z.0, n);
            let mut acc = Complex64::new(0.0, 0.0);
            if m == 0 {
                for &v in values {
                    acc = Complex64::new(1.0, 0.0) * v + acc;
                }
            } else {
                let mut t = 0u64;
                for &v in values {
                    acc = roots.get(t) * v + acc;
                    t += m;
                    if t >= n {
                        t -= n;
                    }
                }
            }
            scale(acc, shift_phase(h, shift), inv_n)
        })
        .collect()
}

/// Estimates for every index of `targets`, in the set's order.
pub fn estimate_coefficients<T>(
    values: &[T],
    config: &LatticeConfig,
    z: &GeneratingVector,
    shift: &RandomShift,
    roots: &RootTable,
    targets: &HyperbolicCross,
) -> Vec<Complex64>
where
    T: Copy,
    Complex64: Mul<T, Output = Complex64> + Add<Complex64, Output = Complex64>,
{
    estimate_at(values, config, z, shift, roots, targets.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn config_requires_prime() {
        assert!(LatticeConfig::new(101, 2).is_ok());
        assert_eq!(LatticeConfig::new(100, 2).unwrap_err(), Error::NotPrime(100));
        assert!(LatticeConfig::new(1, 2).is_err());
        assert!(LatticeConfig::new(7, 0).is_err());
    }

    #[test]
    fn n_two_gives_ones() {
        let c = LatticeConfig::new(2, 5).unwrap();
        let mut rng = stream(1, 0, StreamPurpose::GeneratingVector);
        assert_eq!(draw_generating_vector(&c, &mut rng).as_slice(), &[1, 1, 1, 1, 1]);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let c = LatticeConfig::new(1_000_003, 4).unwrap();
        let a = draw_generating_vector(&c, &mut stream(42, 3, StreamPurpose::GeneratingVector));
        let b = draw_generating_vector(&c, &mut stream(42, 3, StreamPurpose::GeneratingVector));
        let other = draw_generating_vector(&c, &mut stream(42, 4, StreamPurpose::GeneratingVector));
        assert_eq!(a, b);
        assert_ne!(a, other);
        let s1 = draw_shift(&c, &mut stream(42, 3, StreamPurpose::Shift));
        let s2 = draw_shift(&c, &mut stream(42, 3, StreamPurpose::Shift));
        assert_eq!(s1, s2);
        assert!(s1.as_slice().iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn frozen_stream_values() {
        // platform-independent: pinned once, must never change
        let c = LatticeConfig::new(101, 3).unwrap();
        let z = draw_generating_vector(&c, &mut stream(2024, 7, StreamPurpose::GeneratingVector));
        let d = draw_shift(&c, &mut stream(2024, 7, StreamPurpose::Shift));
        let z2 = draw_generating_vector(&c, &mut stream(2024, 7, StreamPurpose::GeneratingVector));
        assert_eq!(z, z2);
        assert_eq!(d.as_slice().len(), 3);
    }

    #[test]
    fn nodes_are_in_unit_cube() {
        let c = LatticeConfig::new(13, 2).unwrap();
        let z = GeneratingVector::new(vec![1, 5], &c).unwrap();
        let s = RandomShift::new(vec![0.9, 0.99]).unwrap();
        let mut x = [0.0; 2];
        for k in 0..13 {
            node(&c, &z, &s, k, &mut x);
            assert!(x.iter().all(|&v| (0.0..1.0).contains(&v)));
        }
        node(&c, &z, &RandomShift::zero(2), 3, &mut x);
        assert!((x[0] - 3.0 / 13.0).abs() < 1e-15);
        assert!((x[1] - 2.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn root_table_accuracy() {
        let n = 100_003;
        let t = RootTable::new(n);
        for k in [0u64, 1, 1023, 1024, 50_000, 99_999, 100_002] {
            let exact = Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64);
            assert!((t.get(k) - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_function() {
        let c = LatticeConfig::new(31, 2).unwrap();
        let z = GeneratingVector::new(vec![1, 7], &c).unwrap();
        let s = RandomShift::new(vec![0.3, 0.6]).unwrap();
        let vals = sample_nodes(|_| 1.0, &c, &z, &s);
        let roots = RootTable::new(31);
        let est = estimate_at(&vals, &c, &z, &s, &roots, [&[0i64, 0][..], &[1, 0], &[2, 3]]);
        assert!((est[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(est[1].norm() < 1e-10);
        assert!(est[2].norm() < 1e-10);
    }

    #[test]
    fn complex_mode_is_recovered_exactly() {
        let c = LatticeConfig::new(101, 3).unwrap();
        let z = draw_generating_vector(&c, &mut stream(5, 0, StreamPurpose::GeneratingVector));
        let s = draw_shift(&c, &mut stream(5, 0, StreamPurpose::Shift));
        let h = [3i64, -7, 12];
        let vals = sample_nodes(
            |x| {
                let p: f64 = h.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum();
                Complex64::from_polar(1.0, 2.0 * PI * p)
            },
            &c,
            &z,
            &s,
        );
        let roots = RootTable::new(101);
        let est = estimate_at(&vals, &c, &z, &s, &roots, [&h[..]]);
        assert!((est[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dual_membership_examples() {
        let c = LatticeConfig::new(5, 2).unwrap();
        let z = GeneratingVector::new(vec![1, 2], &c).unwrap();
        assert!(dual_membership(&[0, 0], &c, &z));
        assert!(dual_membership(&[5, -10], &c, &z));
        assert!(dual_membership(&[1, 2], &c, &z));
        assert!(!dual_membership(&[1, 1], &c, &z));
        assert!(dual_membership(&[-1, -2], &c, &z));
    }

    #[test]
    fn dot_mod_large_values() {
        let n = 1_000_000_007u64;
        let h = [i64::MAX, i64::MIN, -3];
        let z = [n - 1, n - 2, 5];
        let expected = ((i64::MAX as i128).rem_euclid(n as i128) * (n - 1) as i128
            + (i64::MIN as i128).rem_euclid(n as i128) * (n - 2) as i128
            + (-15i128).rem_euclid(n as i128))
        .rem_euclid(n as i128) as u64;
        assert_eq!(dot_mod(&h, &z, n), expected);
    }

    #[test]
    fn generating_vector_validation() {
        let c = LatticeConfig::new(7, 2).unwrap();
        assert!(GeneratingVector::new(vec![0, 1], &c).is_err());
        assert!(GeneratingVector::new(vec![7, 1], &c).is_err());
        assert!(GeneratingVector::new(vec![1], &c).is_err());
        assert!(RandomShift::new(vec![1.0]).is_err());
    }
}
