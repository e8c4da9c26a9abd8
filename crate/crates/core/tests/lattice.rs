use std::cell::Cell;
use std::f64::consts::PI;

use medlat_core::index_set::HyperbolicCross;
use medlat_core::korobov::KorobovSpace;
use medlat_core::lattice::*;
use medlat_core::Complex64;
use proptest::prelude::*;

// Wilson-Hilferty upper quantile of chi-square with k degrees of freedom.
fn chi2_quantile(k: f64, z: f64) -> f64 {
    let c = 2.0 / (9.0 * k);
    k * (1.0 - c + z * c.sqrt()).powi(3)
}

#[test]
fn generating_vector_components_are_uniform() {
    let config = LatticeConfig::new(101, 2).unwrap();
    let draws = 100_000u64;
    let mut counts = vec![[0u64; 100]; 2];
    for i in 0..draws {
        let z = draw_generating_vector(&config, &mut stream(99, i, StreamPurpose::GeneratingVector));
        for (j, &zj) in z.as_slice().iter().enumerate() {
            counts[j][(zj - 1) as usize] += 1;
        }
    }
    let expected = draws as f64 / 100.0;
    // upper 1e-3 point of the standard normal
    let critical = chi2_quantile(99.0, 3.090_232);
    for c in &counts {
        let chi2: f64 = c.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < critical, "chi2 = {chi2}, critical = {critical}");
    }
}

#[test]
fn shift_components_are_uniform() {
    let config = LatticeConfig::new(101, 2).unwrap();
    let n = 100_000usize;
    let mut cols: Vec<Vec<f64>> = (0..2).map(|_| Vec::with_capacity(n)).collect();
    for i in 0..n {
        let s = draw_shift(&config, &mut stream(7, i as u64, StreamPurpose::Shift));
        for (j, &v) in s.as_slice().iter().enumerate() {
            cols[j].push(v);
        }
    }
    // asymptotic Kolmogorov-Smirnov critical value at level 1e-3
    let critical = 1.949 / (n as f64).sqrt();
    for mut c in cols {
        c.sort_by(f64::total_cmp);
        let d = c
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / n as f64 - x).max(x - i as f64 / n as f64))
            .fold(0.0, f64::max);
        assert!(d < critical, "D = {d}");
    }
}

#[test]
fn geometric_sum_cancels() {
    let config = LatticeConfig::new(10_007, 3).unwrap();
    let roots = RootTable::new(10_007);
    for seed in 0..20 {
        let z = draw_generating_vector(&config, &mut stream(seed, 0, StreamPurpose::GeneratingVector));
        let s = draw_shift(&config, &mut stream(seed, 0, StreamPurpose::Shift));
        let vals = sample_nodes(|_| 1.0, &config, &z, &s);
        let h = [3i64, -1, 4];
        let est = estimate_at(&vals, &config, &z, &s, &roots, [&h[..]]);
        if dual_membership(&h, &config, &z) {
            assert!((est[0].norm() - 1.0).abs() < 1e-10);
        } else {
            assert!(est[0].norm() <= 1e-10, "{}", est[0]);
        }
    }
}

#[test]
fn evaluation_count_is_n_regardless_of_targets() {
    let space = KorobovSpace::with(1.0, &[1.0, 1.0]).unwrap();
    let config = LatticeConfig::new(1009, 2).unwrap();
    let roots = RootTable::new(1009);
    let z = draw_generating_vector(&config, &mut stream(1, 0, StreamPurpose::GeneratingVector));
    let s = draw_shift(&config, &mut stream(1, 0, StreamPurpose::Shift));
    for radius in [1.0, 5.0, 30.0] {
        let targets = HyperbolicCross::enumerate(radius, &space).unwrap();
        let calls = Cell::new(0u64);
        let vals = sample_nodes(
            |x| {
                calls.set(calls.get() + 1);
                x[0] * x[1]
            },
            &config,
            &z,
            &s,
        );
        let est = estimate_coefficients(&vals, &config, &z, &s, &roots, &targets);
        assert_eq!(est.len(), targets.len());
        assert_eq!(calls.get(), 1009);
    }
}

#[test]
fn dual_collision_rate() {
    let config = LatticeConfig::new(101, 2).unwrap();
    let ell = [1i64, 3];
    let trials = 10_000u64;
    let hits = (0..trials)
        .filter(|&i| {
            let z = draw_generating_vector(&config, &mut stream(5, i, StreamPurpose::GeneratingVector));
            dual_membership(&ell, &config, &z)
        })
        .count() as f64;
    let p = 1.0 / 100.0;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!(hits / trials as f64 <= p + 3.0 * sigma);
}

#[test]
fn multiples_of_n_are_always_dual() {
    let config = LatticeConfig::new(13, 3).unwrap();
    for i in 0..50 {
        let z = draw_generating_vector(&config, &mut stream(3, i, StreamPurpose::GeneratingVector));
        assert!(dual_membership(&[13, -26, 0], &config, &z));
        assert!(dual_membership(&[0, 0, 0], &config, &z));
    }
}

fn prime_strategy() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 31, 101, 257, 1009])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aliasing_identity(
        n in prime_strategy(),
        d in 1usize..=3,
        seed in any::<u64>(),
        h in prop::collection::vec(-40i64..40, 3),
        hp in prop::collection::vec(-40i64..40, 3),
    ) {
        let config = LatticeConfig::new(n, d).unwrap();
        let z = draw_generating_vector(&config, &mut stream(seed, 0, StreamPurpose::GeneratingVector));
        let s = draw_shift(&config, &mut stream(seed, 0, StreamPurpose::Shift));
        let (h, hp) = (&h[..d], &hp[..d]);
        let vals = sample_nodes(
            |x| {
                let p: f64 = hp.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum();
                Complex64::from_polar(1.0, 2.0 * PI * p)
            },
            &config, &z, &s,
        );
        let roots = RootTable::new(n);
        let est = estimate_at(&vals, &config, &z, &s, &roots, [h])[0];
        let diff: Vec<i64> = hp.iter().zip(h).map(|(a, b)| a - b).collect();
        if dual_membership(&diff, &config, &z) {
            let phase: f64 = diff.iter().zip(s.as_slice()).map(|(&a, &b)| a as f64 * b).sum();
            let expected = Complex64::from_polar(1.0, 2.0 * PI * phase);
            prop_assert!((est - expected).norm() < 1e-10, "{} vs {}", est, expected);
        } else {
            prop_assert!(est.norm() < 1e-10, "{}", est);
        }
    }

    #[test]
    fn conjugate_symmetry_for_real_input(
        d in 1usize..=3,
        seed in any::<u64>(),
        h in prop::collection::vec(-60i64..60, 3),
    ) {
        let config = LatticeConfig::new(1009, d).unwrap();
        let z = draw_generating_vector(&config, &mut stream(seed, 1, StreamPurpose::GeneratingVector));
        let s = draw_shift(&config, &mut stream(seed, 1, StreamPurpose::Shift));
        let vals = sample_nodes(|x| x.iter().map(|v| (v - 0.3).abs()).sum::<f64>(), &config, &z, &s);
        let roots = RootTable::new(1009);
        let h = &h[..d];
        let neg: Vec<i64> = h.iter().map(|v| -v).collect();
        let est = estimate_at(&vals, &config, &z, &s, &roots, [h, &neg[..]]);
        prop_assert!((est[1] - est[0].conj()).norm() < 1e-12);
    }

    #[test]
    fn nodes_stay_in_unit_cube(seed in any::<u64>(), k in 0u64..1009) {
        let config = LatticeConfig::new(1009, 3).unwrap();
        let z = draw_generating_vector(&config, &mut stream(seed, 2, StreamPurpose::GeneratingVector));
        let s = draw_shift(&config, &mut stream(seed, 2, StreamPurpose::Shift));
        let mut x = [0.0; 3];
        node(&config, &z, &s, k, &mut x);
        prop_assert!(x.iter().all(|&v| (0.0..1.0).contains(&v)));
        prop_assert!(z.as_slice().iter().all(|&v| (1..1009).contains(&v)));
    }
}
