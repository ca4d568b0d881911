use std::sync::Arc;

use approx::assert_abs_diff_eq;
use dacx_fastfn::eval::{u_eval_quadrature, QuadConfig};
use dacx_fastfn::{
    expr_eval, expr_tail, j_apply, switch_point, u_eval, u_tail, FastExpr, LaplaceData, Ray,
};
use dacx_num::quad::{integrate, QuadOptions};
use dacx_num::{Rational, Scalar};
use proptest::prelude::*;

const SQRT_PI: f64 = 1.772_453_850_905_516;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

#[test]
fn gaussian_tail_is_exact() {
    let t = u_tail::<Rational>(2, 1, Ray::Minus, 5);
    assert_eq!(
        t.coeffs,
        vec![q(-1, 2), q(0, 1), q(1, 4), q(0, 1), q(-3, 8)]
    );
}

#[test]
fn plus_ray_tail_follows_reflection() {
    // U^+(X) = −U^-(−X): a tail Σ u_m X^{−m} maps to Σ −(−1)^m u_m X^{−m},
    // which leaves odd-index coefficients unchanged.
    let minus = u_tail::<Rational>(2, 1, Ray::Minus, 9);
    let plus = u_tail::<Rational>(2, 1, Ray::Plus, 9);
    for m in 1..=9 {
        let sign = if m % 2 == 0 { q(-1, 1) } else { q(1, 1) };
        assert_eq!(plus.get(m), sign * minus.get(m));
    }
}

#[test]
fn quartic_leading_term() {
    let t = u_tail::<Rational>(4, 1, Ray::Minus, 3);
    assert_eq!(t.coeffs, vec![q(0, 1), q(0, 1), q(-1, 4)]);
}

/// `U_1^-(X) = e^{X²}(√π/2)erfc(−X)` for p = 2, evaluated to 40 digits offline.
const U1_TABLE: [(f64, f64); 23] = [
    (-12.0, 0.041_523_472_234_513_302_5),
    (-11.0, 0.045_268_998_442_758_988_9),
    (-8.0, 0.062_022_738_669_506_981_7),
    (-5.25, 0.093_596_849_843_251_427_5),
    (-6.0, 0.082221092435930453706),
    (-5.5, 0.089475436399077951961),
    (-5.0, 0.098109430731538791444),
    (-4.5, 0.1085493315062893141),
    (-4.0, 0.1214126081197535608),
    (-3.5, 0.13762541895258984288),
    (-3.0, 0.15863563986398753864),
    (-2.5, 0.18682227588778205812),
    (-2.0, 0.22633852499058728968),
    (-1.5, 0.28499765489475457746),
    (-1.0, 0.37893607807065605302),
    (-0.5, 0.5456413607650470421),
    (0.0, 0.88622692545275801365),
    (0.5, 1.7302344337037001934),
    (1.0, 4.4390930166280660041),
    (1.5, 16.531576264633181179),
    (2.0, 96.546362753573046785),
    (2.5, 917.96700362595893002),
    (3.0, 14362.183676001718929),
];

#[test]
fn closed_form_oracle_on_grid() {
    let cfg = QuadConfig::default();
    for &(x, o) in &U1_TABLE {
        let v = u_eval(2, 1, Ray::Minus, x, &cfg).unwrap();
        assert!(
            (v - o).abs() <= 1e-12 * o.abs().max(1.0),
            "X={x}: {v} vs {o}"
        );
    }
}

#[test]
fn reflection_on_grid() {
    let cfg = QuadConfig::default();
    for k in 0..=48 {
        let x = -6.0 + 0.25 * k as f64;
        let a = u_eval(2, 1, Ray::Plus, x, &cfg).unwrap();
        let b = u_eval(2, 1, Ray::Minus, -x, &cfg).unwrap();
        assert!((a + b).abs() <= 1e-10 * a.abs().max(1.0), "X={x}");
    }
}

#[test]
fn ode_residual_where_quadrature_is_used() {
    let cfg = QuadConfig::default();
    let h = 1e-4;
    for &(p, j) in &[(2u32, 1u32), (4, 1), (4, 2), (4, 3)] {
        let s = switch_point(p, j, &cfg);
        let mut x = -s + 0.1;
        while x < 1.0 {
            let u = |t: f64| u_eval(p, j, Ray::Minus, t, &cfg).unwrap();
            let d = (u(x + h) - u(x - h)) / (2.0 * h);
            let r = d - p as f64 * x.powi(p as i32 - 1) * u(x) - x.powi(j as i32 - 1);
            assert!(r.abs() <= 1e-6, "p={p} j={j} X={x}: residual {r}");
            x += 0.2;
        }
    }
}

#[test]
fn tail_bounds_error_beyond_switch_point() {
    let cfg = QuadConfig::default();
    for &(p, j) in &[(2u32, 1u32), (4, 1), (4, 3)] {
        let s = switch_point(p, j, &cfg);
        let tail = u_tail::<f64>(p, j, Ray::Minus, 12);
        for k in 0..10 {
            let x = -(s + 0.5 * k as f64);
            let exact = u_eval_quadrature(p, j, Ray::Minus, x, &cfg).unwrap();
            for m in 1..11 {
                let err = (exact - tail.partial_sum(x, m)).abs();
                // Next nonzero omitted term bounds the error for these alternating tails.
                let next = (m + 1..=12)
                    .map(|i| tail.get(i))
                    .find(|c| *c != 0.0)
                    .unwrap_or(0.0);
                let bound = next.abs()
                    * x.abs()
                        .powi(-(m as i32 + 1))
                        .max(x.abs().powi(-(m as i32 + p as i32)));
                assert!(
                    err <= bound + 2e-12,
                    "p={p} j={j} X={x} M={m}: {err} > {bound}"
                );
            }
        }
    }
}

#[test]
fn j_of_monomial_is_special_u() {
    let cfg = QuadConfig::default();
    for j in 1..=3u32 {
        let e: FastExpr<f64> = FastExpr::JApply {
            ray: Ray::Minus,
            p: 4,
            child: Arc::new(FastExpr::Monomial(j as i32 - 1)),
        };
        let u: FastExpr<f64> = FastExpr::u(4, j, Ray::Minus);
        for k in 0..=20 {
            let x = -3.0 + 0.2 * k as f64;
            assert_abs_diff_eq!(
                e.eval(x, &cfg).unwrap(),
                u.eval(x, &cfg).unwrap(),
                epsilon = 1e-11
            );
        }
    }
}

#[test]
fn j_of_zero_is_zero() {
    assert_eq!(
        j_apply::<f64>(Ray::Minus, 2, FastExpr::Zero),
        FastExpr::Zero
    );
}

#[test]
fn j_of_u_at_origin_matches_nested_quadrature() {
    let cfg = QuadConfig::default();
    let e = j_apply::<f64>(Ray::Minus, 2, FastExpr::u(2, 1, Ray::Minus));
    let v = expr_eval(&e, 0.0, &cfg).unwrap();
    // Oracle: ∫_{−∞}^0 e^{−T²}U(T) dT = ∫_{−∞}^0 ∫_{−∞}^T e^{−s²} ds dT, done by nested quadrature.
    let opts = QuadOptions::with_abs_tol(1e-13);
    let inner = |t: f64| {
        integrate(|s| (-s * s).exp(), -40.0, t, &opts)
            .unwrap()
            .value
    };
    let oracle = integrate(inner, -40.0, 0.0, &opts).unwrap().value;
    assert_abs_diff_eq!(v, oracle, epsilon = 1e-9);
    assert_abs_diff_eq!(v, 0.5, epsilon = 1e-9);
}

#[test]
fn j_of_u_tail_and_residual() {
    let cfg = QuadConfig::default();
    let u: FastExpr<f64> = FastExpr::u(2, 1, Ray::Minus);
    let e = j_apply(Ray::Minus, 2, u.clone());
    // W' = 2XW + U.
    let h = 1e-4;
    for &x in &[-4.0, -2.5, -1.0, 0.0, 0.5] {
        let w = |t: f64| e.eval(t, &cfg).unwrap();
        let r = (w(x + h) - w(x - h)) / (2.0 * h) - 2.0 * x * w(x) - u.eval(x, &cfg).unwrap();
        assert!(r.abs() < 1e-6, "X={x}: {r}");
    }
    // Tail by the formal rule: W ~ 1/(4X²) + …
    let t = expr_tail(&e.convert::<Rational>(), 4).unwrap();
    assert!(t.poly.is_empty());
    assert_eq!(t.tail.coeffs, vec![q(0, 1), q(1, 4), q(0, 1), q(-3, 8)]);
    let x = -8.0;
    let direct = e.eval(x, &cfg).unwrap();
    assert_abs_diff_eq!(
        direct,
        1.0 / (4.0 * x * x) - 3.0 / (8.0 * x.powi(4)),
        epsilon = 1e-5
    );
}

#[test]
fn product_with_x_moves_leading_term_into_polynomial_part() {
    let e: FastExpr<Rational> =
        FastExpr::Product(vec![FastExpr::Monomial(1), FastExpr::u(2, 1, Ray::Minus)]);
    let a = expr_tail(&e, 4).unwrap();
    assert_eq!(a.poly, vec![q(-1, 2)]);
    assert_eq!(a.tail.get(1), q(0, 1));
    assert_eq!(a.tail.get(2), q(1, 4));
}

#[test]
fn sum_with_zero_and_scaling() {
    let cfg = QuadConfig::default();
    let u: FastExpr<f64> = FastExpr::u(2, 1, Ray::Minus);
    let s = FastExpr::Sum(vec![FastExpr::Zero, u.clone()]);
    for &x in &[-3.0, -0.5, 0.7] {
        assert_eq!(s.eval(x, &cfg).unwrap(), u.eval(x, &cfg).unwrap());
    }
    let sc = FastExpr::Scale(2.0, Arc::new(u));
    assert_abs_diff_eq!(sc.eval(0.0, &cfg).unwrap(), SQRT_PI, epsilon = 1e-12);
}

#[test]
fn derivative_and_t_shift_nodes() {
    let cfg = QuadConfig::default();
    let u: FastExpr<f64> = FastExpr::u(2, 1, Ray::Minus);
    let d = u.clone().derivative();
    for &x in &[-5.0, -2.0, -0.3, 0.4] {
        let fd = dacx_fastfn::eval::finite_difference(&u, x, &cfg).unwrap();
        assert_abs_diff_eq!(d.eval(x, &cfg).unwrap(), fd, epsilon = 1e-8);
        let t = u.clone().t_shift();
        assert_abs_diff_eq!(
            t.eval(x, &cfg).unwrap(),
            x * u.eval(x, &cfg).unwrap() + 0.5,
            epsilon = 1e-12
        );
    }
    let dt = expr_tail(&d.convert::<Rational>(), 4).unwrap();
    assert_eq!(dt.tail.coeffs, vec![q(0, 1), q(1, 2), q(0, 1), q(-3, 4)]);
}

#[test]
fn layer_function_solves_its_ode() {
    let cfg = QuadConfig::default();
    let l: FastExpr<f64> = FastExpr::Layer { p: 2 };
    let h = 1e-4;
    for k in 0..=40 {
        let x = -8.0 + 0.4 * k as f64;
        let f = |t: f64| l.eval(t, &cfg).unwrap();
        let r = (f(x + h) - f(x - h)) / (2.0 * h) + 2.0 * x * f(x) - 1.0;
        assert!(r.abs() < 1e-6, "X={x}: {r}");
    }
}

#[test]
fn laplace_node_reproduces_its_tail() {
    let cfg = QuadConfig::default();
    let coeffs: Vec<f64> = u_tail::<f64>(2, 1, Ray::Minus, 30).coeffs;
    let e = FastExpr::Laplace(Arc::new(LaplaceData {
        p: 2,
        rho: 0.9,
        coeffs: coeffs.clone(),
    }));
    let t = expr_tail(&e, 8).unwrap();
    assert_eq!(t.tail.coeffs, coeffs[..8].to_vec());
    for &x in &[-20.0, -12.0, 15.0] {
        let v = e.eval(x, &cfg).unwrap();
        let partial: f64 = (1..=6).map(|m| coeffs[m - 1] * x.powi(-(m as i32))).sum();
        assert!(
            (v - partial).abs() < 10.0 * coeffs[6].abs().max(coeffs[7].abs()) * x.abs().powi(-7),
            "X={x}"
        );
    }
    assert!(e.eval(0.0, &cfg).unwrap().abs() < 1e-15);
}

#[test]
fn integral_of_derivative_recovers_function() {
    let cfg = QuadConfig::default();
    let u: FastExpr<f64> = FastExpr::u(2, 1, Ray::Minus);
    let e = FastExpr::Integral {
        ray: Ray::Minus,
        child: Arc::new(u.clone().derivative()),
    };
    for x in [-6.0, -1.5, -0.5, 0.0, 0.7] {
        assert_abs_diff_eq!(
            e.eval(x, &cfg).unwrap(),
            u.eval(x, &cfg).unwrap(),
            epsilon = 1e-10
        );
    }
    let t = expr_tail(&e, 4).unwrap();
    assert_eq!(t.tail.coeffs, u_tail::<f64>(2, 1, Ray::Minus, 4).coeffs);
}

#[test]
fn integral_after_log_subtraction() {
    // U has residue −1/2; adding (1/2)X/(X²+1) makes it O(X^{−2}).
    let cfg = QuadConfig::default();
    let v: FastExpr<Rational> =
        FastExpr::u(2, 1, Ray::Minus).add(FastExpr::LogDeriv { p: 2 }.scale(q(1, 2)));
    let tail = expr_tail(&v, 4).unwrap();
    assert_eq!(tail.tail.coeffs, vec![q(0, 1), q(0, 1), q(-1, 4), q(0, 1)]);
    let h = FastExpr::Integral {
        ray: Ray::Minus,
        child: Arc::new(v.clone()),
    };
    let ht = expr_tail(&h, 3).unwrap();
    assert_eq!(ht.tail.coeffs, vec![q(0, 1), q(1, 8), q(0, 1)]);
    for x in [-3.0, -1.0, 0.5] {
        let d = dacx_fastfn::eval::finite_difference(&h, x, &cfg).unwrap();
        assert_abs_diff_eq!(d, expr_eval(&v, x, &cfg).unwrap(), epsilon = 1e-8);
    }
}

proptest! {
    #[test]
    fn tail_prefix_is_stable(p in 2u32..6, j in 1u32..5, m in 1usize..20, extra in 1usize..20) {
        let short = u_tail::<Rational>(p, j, Ray::Minus, m);
        let long = u_tail::<Rational>(p, j, Ray::Minus, m + extra);
        prop_assert_eq!(short.coeffs, long.coeffs[..m].to_vec());
    }

    #[test]
    fn tail_satisfies_the_ode_termwise(p in 2u32..6, j in 1u32..6) {
        // X^{j−1} + pX^{p−1}U − U' vanishes up to the truncation order.
        let order = 20;
        let a = expr_tail(&FastExpr::<Rational>::u(p, j, Ray::Minus), order).unwrap();
        let lhs = a.derivative();
        let rhs = a.mul_monomial(p as i64 - 1).scale(&Rational::from_i64(p as i64))
            .add(&dacx_fastfn::Asymptotic::monomial(j as i64 - 1, order));
        let reach = order as i64 - p as i64;
        for k in -reach..(j as i64 + 1) {
            prop_assert_eq!(lhs.coeff(k), rhs.coeff(k), "k = {}", k);
        }
    }
}
