use crate::{Error, Result};

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
///
/// The first twelve primes as witnesses suffice below `3.3 * 10^24`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest prime `<= n`.
pub fn prev_prime(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument("no prime below 2"));
    }
    let mut k = n;
    while !is_prime(k) {
        k -= 1;
    }
    Ok(k)
}

/// Smallest prime `> n`, or `None` past the largest 64-bit prime.
pub fn next_prime(n: u64) -> Option<u64> {
    let mut k = n.checked_add(1)?;
    loop {
        if is_prime(k) {
            return Some(k);
        }
        k = k.checked_add(1)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                return false;
            }
            p += 1;
        }
        true
    }

    #[test]
    fn small_numbers_match_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_division(n), "n={n}");
        }
    }

    #[test]
    fn strong_pseudoprimes() {
        // 3215031751 = 151 * 751 * 28351
        assert_eq!(151u64 * 751 * 28351, 3_215_031_751);
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
    }

    #[test]
    fn large_primes() {
        assert!(is_prime(2));
        assert!(is_prime(1_000_003));
        assert!(is_prime(1_000_000_007));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(18_446_744_073_709_551_615));
    }

    #[test]
    fn prev_and_next() {
        assert_eq!(prev_prime(100).unwrap(), 97);
        assert_eq!(prev_prime(2).unwrap(), 2);
        assert!(prev_prime(1).is_err());
        assert_eq!(next_prime(97), Some(101));
        assert_eq!(next_prime(18_446_744_073_709_551_557), None);
    }
}
