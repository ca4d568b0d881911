use dacx_fastfn::{u_tail, FastExpr, QuadConfig, Ray};
use dacx_gevrey::{
    borel_laplace, gevrey_fit, gevrey_tail_check, optimal_truncate, synth_constants, synth_tails,
    BorelSumConfig, GevreyEstimate,
};
use dacx_num::quad::{integrate, QuadOptions};
use dacx_num::special::ln_gamma;
use proptest::prelude::*;

fn synthetic(c: f64, l: f64, p: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| c * l.powi(k as i32) * ln_gamma(k as f64 / p + 1.0).exp())
        .collect()
}

#[test]
fn recovers_cubic_root_order_without_hint() {
    let e = gevrey_fit(&synthetic(3.0, 2.0, 3.0, 41), None).unwrap();
    assert!((e.p - 3.0).abs() < 0.03, "{e:?}");
    assert!(
        (e.c - 3.0).abs() < 0.03 && (e.l1 - 2.0).abs() < 0.02,
        "{e:?}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_recovers_synthetic_parameters(c in 0.2f64..5.0, l in 0.5f64..3.0, p in 1u32..=6) {
        let e = gevrey_fit(&synthetic(c, l, p as f64, 41), None).unwrap();
        prop_assert!((e.p - p as f64).abs() < 0.01 * p as f64, "{:?}", e);
        prop_assert!((e.c / c - 1.0).abs() < 0.01 && (e.l1 / l - 1.0).abs() < 0.01, "{:?}", e);
    }

    #[test]
    fn convergent_series_is_reproduced(r in 0.1f64..0.9, eta in 0.02f64..0.2) {
        // Σ (r η)^n with p = 2
        let a: Vec<f64> = (0..80).map(|n| r.powi(n)).collect();
        let v = borel_laplace(&a, eta, &BorelSumConfig::new(2, 2.0)).unwrap();
        prop_assert!((v - 1.0 / (1.0 - r * eta)).abs() < 1e-10);
    }
}

#[test]
fn euler_series_against_direct_integral() {
    let eta = 0.1;
    let a: Vec<f64> = (0..150)
        .map(|n| (-1f64).powi(n) * ln_gamma(n as f64 + 1.0).exp())
        .collect();
    let v = borel_laplace(&a, eta, &BorelSumConfig::new(1, 0.95)).unwrap();
    let oracle = integrate(
        |t| (-t / eta).exp() / (1.0 + t) / eta,
        0.0,
        60.0 * eta,
        &QuadOptions::default(),
    )
    .unwrap()
    .value;
    assert!((v - oracle).abs() < 1e-4, "{v} vs {oracle}");
}

fn u_family() -> Vec<FastExpr<f64>> {
    vec![FastExpr::u(2, 1, Ray::Minus); 3]
}

fn grid() -> Vec<f64> {
    (0..40).map(|i| -0.25 - 0.25 * i as f64).collect()
}

#[test]
fn calibrated_constants_bound_the_gaussian_family() {
    let cfg = QuadConfig::default();
    let unit = GevreyEstimate {
        p: 2.0,
        c: 1.0,
        l1: 1.0,
        l2: 1.0,
        residual: 0.0,
    };
    let observed = gevrey_tail_check(&u_family(), &unit, &grid(), 8, &cfg).unwrap();
    let calibrated = GevreyEstimate {
        c: 1.1 * observed.worst_ratio,
        ..unit.clone()
    };
    assert!(
        gevrey_tail_check(&u_family(), &calibrated, &grid(), 8, &cfg)
            .unwrap()
            .passed()
    );
    let halved = GevreyEstimate {
        c: 0.5 * calibrated.c,
        ..calibrated
    };
    let r = gevrey_tail_check(&u_family(), &halved, &grid(), 8, &cfg).unwrap();
    assert!(!r.passed());
    assert_eq!(r.witness, observed.witness);
}

#[test]
fn synthesized_functions_reproduce_the_gaussian_tail() {
    let cfg = QuadConfig::default();
    let row: Vec<f64> = u_tail::<f64>(2, 1, Ray::Minus, 8).coeffs;
    let t = GevreyEstimate {
        p: 2.0,
        c: 1.0,
        l1: 1.0,
        l2: 1.0,
        residual: 0.0,
    };
    let s = synth_tails(&[row.clone(), row.clone()], &t).unwrap();
    for g in &s {
        let tail = g.asymptotic(6).unwrap().tail.coeffs;
        for (a, b) in tail.iter().zip(&row) {
            assert!((a - b).abs() < 1e-10);
        }
    }
    // Far out the synthesized function follows the tail.
    let x: f64 = 40.0;
    let partial: f64 = row
        .iter()
        .take(3)
        .enumerate()
        .map(|(i, c)| c * x.powi(-(i as i32) - 1))
        .sum();
    assert!((s[0].eval(x, &cfg).unwrap() - partial).abs() < 1e-6);
    let check = gevrey_tail_check(
        &s,
        &synth_constants(&t),
        &[0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
        6,
        &cfg,
    )
    .unwrap();
    assert!(check.passed(), "{check:?}");
}

#[test]
fn optimal_truncation_balances_the_terms() {
    let est = GevreyEstimate {
        p: 2.0,
        c: 1.0,
        l1: 1.0,
        l2: 1.0,
        residual: 0.0,
    };
    let t = optimal_truncate(&est, 0.25, 1000);
    assert_eq!(t.n_star, 32);
    // Next-term size at N* is the smallest over N.
    let term = |n: usize| ((n as f64) * 0.25f64.ln() + ln_gamma(n as f64 / 2.0 + 1.0)).exp();
    let best = (0..100)
        .min_by(|a, b| term(*a).total_cmp(&term(*b)))
        .unwrap();
    assert!((best as i64 - t.n_star as i64).abs() <= 2);
}
