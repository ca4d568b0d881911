use dacx_core::{mul, two_point_merge, CombinedSeries, FastCoefficient, SlowSeries};
use dacx_fastfn::{u_eval, FastExpr, QuadConfig, Ray};

fn eta_u(levels: usize, order: usize) -> CombinedSeries<f64> {
    let mut y = CombinedSeries::zero(2, levels, order);
    y.terms[1].fast = FastCoefficient::from_expr(FastExpr::u(2, 1, Ray::Minus), order).unwrap();
    y
}

#[test]
fn slow_times_special_function_matches_direct_evaluation() {
    let cfg = QuadConfig::default();
    let mut a = CombinedSeries::<f64>::zero(2, 5, 6);
    a.terms[0].slow = SlowSeries::new(vec![2.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let prod = mul(&a, &eta_u(5, 6)).unwrap();
    assert!(prod.eta_order() >= 4);
    for &(x, eta) in &[(-0.5, 0.1), (-0.3, 0.05), (0.2, 0.1)] {
        let direct = (x + 2.0) * eta * u_eval(2, 1, Ray::Minus, x / eta, &cfg).unwrap();
        let sum = prod.partial_sum(x, eta, 4, &cfg).unwrap();
        // a is linear, so the shift expansion terminates and the sum is exact.
        assert!(
            (sum - direct).abs() < 1e-11,
            "x={x} η={eta}: {sum} vs {direct}"
        );
    }
}

#[test]
fn partial_sums_converge_at_the_expected_rate() {
    // (1 + x + x²/2 + …) · ηU^-: consecutive partial sums differ by O(η^N).
    let cfg = QuadConfig::default();
    let order = 8;
    let mut a = CombinedSeries::<f64>::zero(2, 6, order);
    let mut fact = 1.0;
    a.terms[0].slow = SlowSeries::new(
        (0..order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                1.0 / fact
            })
            .collect(),
    );
    let prod = mul(&a, &eta_u(6, order)).unwrap();
    let n = 3;
    let etas = [0.2, 0.1, 0.05, 0.025];
    let diffs: Vec<f64> = etas
        .iter()
        .map(|&eta| {
            let x = -2.0 * eta;
            (prod.partial_sum(x, eta, n + 1, &cfg).unwrap()
                - prod.partial_sum(x, eta, n, &cfg).unwrap())
            .abs()
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = etas
        .iter()
        .zip(&diffs)
        .map(|(e, d)| (e.ln(), d.ln()))
        .unzip();
    let slope = dacx_num::fit::line(&xs, &ys).unwrap().coeffs[0];
    assert!(slope >= n as f64 - 0.3, "slope {slope}, diffs {diffs:?}");
}

#[test]
fn merge_of_consistent_slow_parts_evaluates_to_sum_of_parts() {
    let cfg = QuadConfig::default();
    let mut left = CombinedSeries::<f64>::zero(2, 1, 3);
    left.terms[0].slow = SlowSeries::new(vec![0.0, 0.0, 1.0]);
    left.terms[0].fast =
        FastCoefficient::from_expr(FastExpr::ExpPow { sign: -1, p: 2 }, 3).unwrap();
    // x² about d = 2 in the variable t = 2 − x: 4 − 4t + t².
    let mut right = CombinedSeries::<f64>::zero(2, 1, 3);
    right.terms[0].slow = SlowSeries::new(vec![4.0, -4.0, 1.0]);
    right.terms[0].fast =
        FastCoefficient::from_expr(FastExpr::ExpPow { sign: -1, p: 4 }, 3).unwrap();
    let m = two_point_merge(&left, 0.0, &right, 2.0, (0.5, 1.5), 1e-12).unwrap();
    let eta = 0.3;
    for i in 0..=20 {
        let x = i as f64 / 10.0;
        let expected = x * x + (-(x / eta).powi(2)).exp() + (-((2.0 - x) / eta).powi(4)).exp();
        assert!((m.eval(x, eta, 1, &cfg).unwrap() - expected).abs() < 1e-12);
    }
}
