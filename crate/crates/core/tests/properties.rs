use dynovs::harness::{read_csv_from, write_csv, ResultRow};
use dynovs::linalg::{c, max_abs, CMat};
use dynovs::metrics::{power_consumption, wilson, PowerModel, Z_95};
use dynovs::quantization::arcsin_cov;
use dynovs::reduction::{rgs_block, uniform_init, SubmatrixPartition};
use dynovs::signal_model::{complex_gaussian, trial_rng};
use dynovs::{RatioTraceProblem, SystemConfig};
use proptest::prelude::*;

fn random_cov(n: usize, seed: u64) -> CMat {
    let mut rng = trial_rng(seed, 0);
    let x = CMat::from_fn(n, n + 3, |_, _| complex_gaussian(&mut rng, 1.0));
    &x * x.adjoint() + CMat::identity(n, n) * c(0.1, 0.0)
}

fn random_problem(n: usize, m: usize, seed: u64) -> RatioTraceProblem {
    let mut rng = trial_rng(seed, 1);
    let x = CMat::from_fn(n, 2, |_, _| complex_gaussian(&mut rng, 1.0));
    let b = random_cov(n, seed);
    RatioTraceProblem::new(&x * x.adjoint() + &b, b, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arcsin_law_ignores_per_sample_gain(n in 2usize..8, seed in any::<u64>(), g in proptest::collection::vec(0.05f64..20.0, 8)) {
        let cy = random_cov(n, seed);
        let d = CMat::from_fn(n, n, |i, j| if i == j { c(g[i], 0.0) } else { c(0.0, 0.0) });
        let scaled = &d * &cy * &d;
        let diff = max_abs(&(arcsin_cov(&cy).unwrap() - arcsin_cov(&scaled).unwrap()));
        prop_assert!(diff < 1e-10);
    }

    #[test]
    fn arcsin_law_commutes_with_permutation(n in 2usize..8, seed in any::<u64>(), shift in 0usize..8) {
        let cy = random_cov(n, seed);
        let perm: Vec<usize> = (0..n).map(|i| (i * 3 + shift) % n).collect();
        // i -> 3i + shift is a bijection when gcd(3, n) = 1
        prop_assume!(n % 3 != 0);
        let p = CMat::from_fn(n, n, |i, j| if perm[i] == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let lhs = arcsin_cov(&(&p * &cy * p.transpose())).unwrap();
        let rhs = &p * arcsin_cov(&cy).unwrap() * p.transpose();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn rgs_history_is_monotone_and_beats_its_start(seed in any::<u64>(), beta in 1usize..6, k in prop::sample::select(vec![1usize, 2, 4])) {
        let cfg = SystemConfig { n_users: 1, n_rx: 2, block_len: 4, m_init: 3, m_proc: 2, n_submatrices: k, search_range: beta, ..Default::default() };
        let p = random_problem(24, 16, seed);
        let init = uniform_init(&cfg, &p).unwrap();
        let part = SubmatrixPartition::new(&p, k).unwrap();
        for b in 0..k {
            let local = part.local_pattern(b, init.selection().unwrap()).unwrap();
            let out = rgs_block(|s| part.block_objective(b, s), &local, part.block_cols, beta, None).unwrap();
            prop_assert!(out.history.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(out.objective() >= part.block_objective(b, &local).unwrap());
        }
    }

    #[test]
    fn power_grows_with_rate_and_resolution(m in 1usize..12, bits in 1u32..16, n_rx in 1usize..256) {
        let pm = PowerModel::default();
        let p = power_consumption(&pm, m, n_rx, bits).unwrap();
        prop_assert!(p > 0.0);
        prop_assert!(power_consumption(&pm, m + 1, n_rx, bits).unwrap() > p);
        prop_assert!(power_consumption(&pm, m, n_rx, bits + 1).unwrap() > p);
    }

    #[test]
    fn wilson_interval_contains_the_point_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let s = ((trials as f64) * frac).round() as u64;
        let w = wilson(s, trials, Z_95).unwrap();
        prop_assert!(0.0 <= w.lo && w.lo <= w.value && w.value <= w.hi && w.hi <= 1.0);
    }

    #[test]
    fn csv_round_trip_is_stable(
        value in -1e12f64..1e12,
        stderr in 0.0f64..1e3,
        snr in proptest::option::of(-30.0f64..40.0),
        k in proptest::option::of(1usize..128),
        bits in proptest::option::of(1u32..16),
        seed in any::<u64>(),
        name in "[a-z ,\"-]{0,12}",
    ) {
        let row = ResultRow {
            scenario: name,
            algorithm: "sl-rgs".into(),
            m_init: 3,
            m_proc: 2,
            k_sub: k,
            beta: Some(5),
            snr_db: snr,
            bits,
            metric: "sum_rate".into(),
            value,
            stderr,
            n_trials: 10,
            seed,
            flops: 42,
        };
        let mut first = Vec::new();
        write_csv(std::slice::from_ref(&row), &mut first).unwrap();
        let back = read_csv_from(first.as_slice(), "mem").unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0].scenario, &row.scenario);
        prop_assert_eq!(back[0].k_sub, row.k_sub);
        prop_assert_eq!(back[0].bits, row.bits);
        prop_assert_eq!(back[0].seed, row.seed);
        prop_assert!((back[0].value - value).abs() <= 1e-11 * value.abs());
        let mut second = Vec::new();
        write_csv(&back, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}
