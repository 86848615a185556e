use percolab_core::numerics::{
    critical_x_star, easy_x_bound, f_limit, f_n, fprime_sign_expr, fprime_sign_expr_n, limit_probability,
    m_value, theta_n, theta_of_x, theta_residual, u_shape_report, x_of_theta, LimitScenario,
    ThetaConfig, G,
};
use percolab_core::rng::substream;
use proptest::prelude::*;
use rand::Rng;

fn cfg() -> ThetaConfig {
    ThetaConfig::default()
}

#[test]
fn theta_is_increasing_on_a_grid() {
    let thetas: Vec<f64> = (0..=1000).map(|i| theta_of_x(i as f64 / 1000.0, &cfg()).unwrap()).collect();
    assert!(thetas.windows(2).all(|w| w[0] < w[1]));
    for (i, t) in thetas.iter().enumerate().skip(1) {
        assert!(theta_residual(i as f64 / 1000.0, *t).abs() < 1e-12);
    }
}

#[test]
fn limit_constants() {
    let sqrt2 = 2f64.sqrt();
    let sqrt5 = 5f64.sqrt();
    assert!((theta_of_x(1.0, &cfg()).unwrap() - (1.0 + sqrt2).ln()).abs() < 1e-12);
    assert!((theta_of_x(0.5, &cfg()).unwrap() - 0.5 * (2.0 + sqrt5).ln()).abs() < 1e-12);
    assert!((limit_probability(LimitScenario::AtOnes) - 0.118_626_1).abs() < 1e-6);
    assert!((limit_probability(LimitScenario::UniformTarget) - 0.278_182_1).abs() < 1e-6);
    assert!((1.0 - theta_of_x(1.0, &cfg()).unwrap() - limit_probability(LimitScenario::AtOnes)).abs() < 1e-12);
}

#[test]
fn theta_n_sequence_approaches_theta() {
    let limit = theta_of_x(0.5, &cfg()).unwrap();
    let gaps: Vec<f64> = [10, 100, 1000, 10_000]
        .iter()
        .map(|&n| (theta_n(n, n / 2, &cfg()).unwrap() - limit).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!((theta_n(1, 1, &cfg()).unwrap() - 2f64.sqrt().ln_1p()).abs() < 1e-12);
}

#[test]
fn g_matches_brute_force_sum() {
    let mut rng = substream(5, 0);
    for _ in 0..100 {
        let n = rng.random_range(1..=10u32);
        let k = rng.random_range(0..=n);
        let a = rng.random_range(0.0..1.5);
        let b = rng.random_range(0.01..1.5);
        let v = (1u32 << k) - 1;
        let sum: f64 = (0..1u32 << n)
            .map(|d| m_value(n, d.count_ones(), a).powi(2) * m_value(n, (v ^ d).count_ones(), b))
            .sum();
        let want = (f64::from(n) * G(f64::from(k) / f64::from(n), a, b).unwrap()).exp();
        assert!((sum - want).abs() <= 1e-9 * want, "n {n} k {k} a {a} b {b}");
    }
}

#[test]
fn profile_endpoints() {
    for n in [2u32, 3, 5, 8, 13, 20, 50, 100, 1000] {
        for k in [1, n / 3, n / 2, n].into_iter().filter(|&k| k >= 1) {
            let theta = theta_n(n, k, &cfg()).unwrap();
            let ln_n = f64::from(n).ln();
            let nf = f64::from(n);
            assert!((f_n(0.0, n, k, &cfg()).unwrap() + ln_n / nf).abs() < 1e-10, "n {n} k {k}");
            assert!((f_n(theta, n, k, &cfg()).unwrap() + 2.0 * ln_n / nf).abs() < 1e-10, "n {n} k {k}");
        }
    }
    for x in [0.01, 0.2, 0.5, 1.0] {
        let theta = theta_of_x(x, &cfg()).unwrap();
        assert!(G(x, 0.0, theta).unwrap().abs() < 1e-12);
        assert!(f_limit(0.0, x, &cfg()).unwrap().abs() < 1e-12);
        assert!(f_limit(theta, x, &cfg()).unwrap().abs() < 1e-12);
        if x == 0.5 {
            for i in 1..100 {
                assert!(f_limit(theta * i as f64 / 100.0, x, &cfg()).unwrap() < 0.0);
            }
        }
    }
}

#[test]
fn sign_expression_matches_finite_differences() {
    let mut rng = substream(12, 0);
    let h = 1e-6;
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(2..=200u32);
        let k = rng.random_range(1..=n);
        let theta = theta_n(n, k, &cfg()).unwrap();
        if theta < 1e-3 {
            continue;
        }
        let t = rng.random_range(2e-5..theta - 2e-5);
        let s = |t| fprime_sign_expr_n(t, n, k, &cfg()).unwrap();
        if s(t - 1e-5).signum() != s(t + 1e-5).signum() {
            continue;
        }
        let fd = (f_n(t + h, n, k, &cfg()).unwrap() - f_n(t - h, n, k, &cfg()).unwrap()) / (2.0 * h);
        assert_eq!(fd.signum(), s(t).signum(), "n {n} k {k} t {t}");
        checked += 1;
    }
}

#[test]
fn sign_pattern_along_t() {
    for x in [0.001, 0.01, 0.1, 0.5, 0.9, 1.0] {
        let theta = theta_of_x(x, &cfg()).unwrap();
        let mut signs: Vec<bool> = (0..=2000)
            .map(|i| fprime_sign_expr(theta * i as f64 / 2000.0, x, &cfg()).unwrap() > 0.0)
            .collect();
        signs.dedup();
        assert!(signs.len() <= 3, "x {x}");
        assert!(!signs[0], "x {x}");
    }
}

#[test]
fn u_shape_threshold() {
    let (theta_star, x_star) = critical_x_star(&cfg()).unwrap();
    assert!((theta_star - 0.0898).abs() < 5e-4);
    assert!((x_star - 0.00167).abs() < 5e-5);
    assert!((x_of_theta(theta_star).unwrap() - x_star).abs() < 1e-15);
    let flags: Vec<bool> =
        (1..=1000).map(|i| u_shape_report(i as f64 / 1000.0, &cfg()).unwrap().u_shaped).collect();
    let first = flags.iter().position(|&f| f).unwrap();
    assert!(flags[first..].iter().all(|&f| f));
    assert!(u_shape_report(easy_x_bound() + 1e-9, &cfg()).unwrap().u_shaped);
    assert!(!u_shape_report(0.001, &cfg()).unwrap().u_shaped);
    assert!(u_shape_report(x_star * 1.01, &cfg()).unwrap().u_shaped);
}

proptest! {
    #[test]
    fn theta_strictly_increasing(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        prop_assume!(a < b);
        prop_assert!(theta_of_x(a, &cfg()).unwrap() < theta_of_x(b, &cfg()).unwrap());
    }

    #[test]
    fn x_of_theta_inverts_theta(x in 1e-6f64..=1.0) {
        let t = theta_of_x(x, &cfg()).unwrap();
        prop_assert!(theta_residual(x, t).abs() < 1e-12);
        prop_assert!((x_of_theta(t).unwrap() - x).abs() < 1e-9);
    }

    #[test]
    fn theta_n_solves_its_equation(n in 1u32..5000, frac in 0.0f64..=1.0) {
        let k = ((frac * f64::from(n)).round() as u32).clamp(1, n);
        let t = theta_n(n, k, &cfg()).unwrap();
        prop_assert!((m_value(n, k, t) * f64::from(n) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn u_shape_monotone_pairs(a in 1e-4f64..=1.0, b in 1e-4f64..=1.0) {
        prop_assume!(a < b);
        let ua = u_shape_report(a, &cfg()).unwrap().u_shaped;
        let ub = u_shape_report(b, &cfg()).unwrap().u_shaped;
        prop_assert!(!ua || ub);
    }
}
