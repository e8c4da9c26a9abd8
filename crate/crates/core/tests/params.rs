use std::f64::consts::E;

use medlat_core::korobov::KorobovSpace;
use medlat_core::median_approx::compute_nstar;
use medlat_core::params::tau::{feasibility_gap, log_derivative_feasibility, log_derivative_nstar};
use medlat_core::params::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tractability_inequality_samples(
        d in 1usize..=50,
        n in 2u64..=1_000_000,
        eta in prop::sample::select(vec![0.1, 0.5]),
        beta in prop::sample::select(vec![1.0, 2.0, 3.0]),
        alpha in 0.6f64..3.0,
    ) {
        let (lhs, rhs) = tractability_inequality(&WeightSequence::Poly { beta }, alpha, d, eta, n).unwrap();
        prop_assert!(lhs <= rhs, "{lhs} > {rhs}");
    }

    #[test]
    fn roots_have_small_residuals(d in 1usize..=10, k in 2u32..=6, g in 0.1f64..=1.0) {
        let n = prev_prime(10u64.pow(k) + 3).unwrap();
        let gammas: Vec<f64> = (0..d).map(|j| g.powi(j as i32)).collect();
        let space = KorobovSpace::with(1.5, &gammas).unwrap();
        let r = tau_roots(n, &space).unwrap();
        prop_assert!(log_derivative_feasibility(r.tau0, n, &space).abs() <= 1e-8);
        prop_assert!(log_derivative_nstar(r.tau0_prime, n, &space).abs() <= 1e-8);
        prop_assert!(r.tau0_prime < r.tau0);
        prop_assert!(r.tau_star() > 1.0 / d as f64);
    }

    #[test]
    fn nstar_over_n_is_below_one(k in 10u32..30, alpha in 0.6f64..3.0) {
        let space = KorobovSpace::with(alpha, &[1.0, 1.0]).unwrap();
        let b = BudgetSpec::new(1u64 << k, 0.01).unwrap();
        let p = select_params(&b, &space, RepetitionRule::Budget).unwrap();
        prop_assert!(p.n_star / (p.modulus as f64 - 1.0) <= 1.0);
        prop_assert!(p.total_evals() <= 1u64 << k);
    }
}

#[test]
fn find_nmax_exhaustive_up_to_2_16() {
    // sieve once, then scan every budget exponent
    let limit = 1usize << 16;
    let mut composite = vec![false; limit + 1];
    for p in 2..=limit {
        if !composite[p] {
            let mut m = p * p;
            while m <= limit {
                composite[m] = true;
                m += p;
            }
        }
    }
    for k in 4..=16 {
        let m = 1u64 << k;
        let lhs = |n: u64| n as f64 * (2.0 * (1.0 + (n as f64 - 1.0) / (4.0 * E)).ln() + 2.0 * 100f64.ln() + 1.0);
        let scan = (2..=m).filter(|&n| !composite[n as usize] && lhs(n) <= m as f64).max();
        let got = find_nmax(&BudgetSpec::new(m, 0.01).unwrap()).ok();
        assert_eq!(got, scan, "M_max = {m}");
    }
}

#[test]
fn asymptotic_tau_at_large_n() {
    let space = KorobovSpace::with(1.5, &[1.0, 1.0]).unwrap();
    let r = tau_roots(1_000_003, &space).unwrap();
    assert!(r.tau0 >= 2.0 * E && r.tau0 <= 1.2 * 2.0 * E);
    assert!(r.tau0_prime >= 0.5 && r.tau0_prime <= 1.2 * 0.5);
}

#[test]
fn perturbing_tau_star_never_helps() {
    let space = KorobovSpace::with(1.5, &[1.0, 1.0]).unwrap();
    let p = select_params(&BudgetSpec::new(1u64 << 46, 0.01).unwrap(), &space, RepetitionRule::Budget).unwrap();
    let (t1, t2) = p.roots.interval.unwrap();
    let best = compute_nstar(p.tau_star, &space, p.modulus);
    for f in [0.99, 1.01] {
        let t = (p.tau_star * f).clamp(t1, t2);
        assert!(compute_nstar(t, &space, p.modulus) <= best * (1.0 + 1e-10));
    }
    assert!(feasibility_gap(p.tau_star, p.modulus, &space) <= 1e-8);
}

#[test]
fn window_rule_implies_first_condition() {
    // with N at the c = 1/e threshold, the window R satisfies the R condition
    let space = KorobovSpace::with(2.5, &[1.0, 1.0]).unwrap();
    for k in [44u32, 48, 52] {
        let p = select_params(&BudgetSpec::new(1u64 << k, 0.01).unwrap(), &space, RepetitionRule::Window).unwrap();
        assert!(p.feasible());
        let rep = check_conditions(p.modulus, p.repetitions, p.tau_star, 0.01, &space);
        assert!(rep.less_than_c.holds);
        assert!(rep.choose_r_first.holds, "{rep:?}");
    }
}
