//! Numeric evaluation: ray quadrature near the origin, optimal-truncation
//! tail sums far out.

use dacx_num::quad::{integrate_pieces, QuadOptions};
use dacx_num::special::ln_gamma;
use dacx_num::Scalar;

use crate::expr::{FastExpr, LaplaceData, Ray};
use crate::tail::{optimal_sum_f64, u_asymptotic, Asymptotic};
use crate::FastError;

/// Quadrature and switching parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    /// `−ln` of the kernel weight at which a ray is cut (1e−18 ↦ 41.4).
    pub kernel_cutoff: f64,
    /// Beyond this `|X|` the tail sum is always used.
    pub switch_cap: f64,
    /// Largest tail order tried by the asymptotic branch.
    pub max_tail_order: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            kernel_cutoff: 18.0 * std::f64::consts::LN_10,
            switch_cap: 12.0,
            max_tail_order: 240,
        }
    }
}

impl QuadConfig {
    fn quad(&self) -> QuadOptions {
        QuadOptions {
            abs_tol: self.abs_tol,
            rel_tol: 1e-13,
            max_intervals: 4000,
        }
    }
}

/// Largest exponent handed to `exp` before the value is declared out of range.
const EXP_LIMIT: f64 = 700.0;

fn pow_p(x: f64, p: u32) -> f64 {
    x.powi(p as i32)
}

/// Ray cut `T_c`: the kernel `e^{X^p − T^p}` has dropped below the cutoff past it.
fn ray_cut(x: f64, p: u32, growth: i64, cfg: &QuadConfig) -> f64 {
    let base = pow_p(x, p).max(0.0) + cfg.kernel_cutoff + 2.0 * growth.max(0) as f64 * 4.0;
    base.powf(1.0 / p as f64).max(x.abs())
}

/// Breakpoints from `x` toward `end`, geometrically spaced on the kernel's
/// decay scale at `x`, so that a sharp endpoint peak is resolved.
fn graded_points(x: f64, end: f64, p: u32) -> Vec<f64> {
    let w = 1.0 / (p as f64 * x.abs().powi(p as i32 - 1) + 1.0);
    let dir = (end - x).signum();
    let mut pts = vec![x];
    let mut d = w;
    while d < (end - x).abs() {
        pts.push(x + dir * d);
        d *= 4.0;
    }
    pts.push(end);
    pts
}

fn check_ray(p: u32, ray: Ray) -> Result<(), FastError> {
    if ray == Ray::Minus && p % 2 == 1 {
        return Err(FastError::Domain(format!(
            "e^(-T^{p}) does not decay along the negative ray for odd p = {p}"
        )));
    }
    Ok(())
}

/// `e^{X^p}∫_{ray}^X e^{−T^p} v(T) dT` by quadrature on the truncated ray.
fn ray_quadrature<F: Fn(f64) -> Result<f64, FastError>>(
    p: u32,
    ray: Ray,
    x: f64,
    growth: i64,
    v: F,
    cfg: &QuadConfig,
) -> Result<f64, FastError> {
    check_ray(p, ray)?;
    // Largest exponent X^p − T^p over the path; only reached at T = 0 off the ray.
    let xp = pow_p(x, p);
    let crosses_zero = ray.sign() * x < 0.0;
    let peak = if crosses_zero { xp } else { 0.0 };
    if peak > EXP_LIMIT {
        return Err(FastError::Domain(format!(
            "X = {x} lies in the exponentially large regime of the ray {ray} (X^p = {xp:.1})"
        )));
    }
    let tc = ray_cut(x, p, growth, cfg);
    // Integrand failures become NaN; the scan below recovers the precise error.
    let f = |t: f64| {
        let k = (xp - pow_p(t, p)).exp();
        if k == 0.0 {
            return 0.0;
        }
        v(t).map_or(f64::NAN, |val| k * val)
    };
    let points: Vec<f64> = match ray {
        Ray::Minus if x > 0.0 => vec![-tc, 0.0, x],
        Ray::Minus => {
            let mut v = graded_points(x, -tc, p);
            v.reverse();
            v
        }
        Ray::Plus if x < 0.0 => vec![x, 0.0, tc],
        Ray::Plus => graded_points(x, tc, p),
    };
    // Tolerance is absolute in units of the result's natural scale.
    let mut opts = cfg.quad();
    opts.abs_tol *= peak.exp().max(1.0);
    let value = match integrate_pieces(f, &points, &opts) {
        Ok(r) => r.value,
        Err(e) => {
            for w in points.windows(2) {
                for k in 0..=16 {
                    v(w[0] + (w[1] - w[0]) * k as f64 / 16.0)?;
                }
            }
            return Err(FastError::Quadrature(e.to_string()));
        }
    };
    Ok(match ray {
        Ray::Minus => value,
        Ray::Plus => -value,
    })
}

/// Tail sum of an asymptotic expansion with optimal truncation.
/// Returns the value and its error estimate.
pub fn asymptotic_value(a: &Asymptotic<f64>, x: f64) -> (f64, f64) {
    let mut poly = 0.0;
    for (k, c) in a.poly.iter().enumerate() {
        poly += c * x.powi(k as i32);
    }
    let (t, e) = optimal_sum_f64(&a.tail.coeffs, x);
    (poly + t, e)
}

fn tail_order_for(x: f64, p: u32, cfg: &QuadConfig) -> usize {
    let guess = 3.0 * x.abs().powi(p as i32) + 24.0;
    (guess.min(cfg.max_tail_order as f64)) as usize
}

/// `U_j` by quadrature only.
pub fn u_eval_quadrature(
    p: u32,
    j: u32,
    ray: Ray,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64, FastError> {
    ray_quadrature(p, ray, x, j as i64 - 1, |t| Ok(t.powi(j as i32 - 1)), cfg)
}

/// `U_j` by optimal-truncation tail summation only; returns value and error estimate.
pub fn u_eval_asymptotic(p: u32, j: u32, x: f64, cfg: &QuadConfig) -> (f64, f64) {
    let a: Asymptotic<f64> = u_asymptotic(p, j, tail_order_for(x, p, cfg));
    asymptotic_value(&a, x)
}

fn on_ray(ray: Ray, x: f64) -> bool {
    ray.sign() * x > 0.0
}

/// Value of `U_j^{ray}(X)`.
pub fn u_eval(p: u32, j: u32, ray: Ray, x: f64, cfg: &QuadConfig) -> Result<f64, FastError> {
    if !x.is_finite() {
        return Err(FastError::Domain(format!("non-finite argument {x}")));
    }
    check_ray(p, ray)?;
    if on_ray(ray, x) && x.abs() >= 1.0 {
        let (v, e) = u_eval_asymptotic(p, j, x, cfg);
        if e <= cfg.abs_tol || x.abs() >= cfg.switch_cap {
            return Ok(v);
        }
    }
    u_eval_quadrature(p, j, ray, x, cfg)
}

/// Smallest `|X|` (on a 1/8 grid) from which the tail sum of `U_j` meets the tolerance.
pub fn switch_point(p: u32, j: u32, cfg: &QuadConfig) -> f64 {
    let mut x = 1.0;
    while x < cfg.switch_cap {
        let (_, e) = u_eval_asymptotic(p, j, -x, cfg);
        let (_, e2) = u_eval_asymptotic(p, j, x, cfg);
        if e.max(e2) <= cfg.abs_tol {
            return x;
        }
        x += 0.125;
    }
    cfg.switch_cap
}

/// Value of `J^{ray}(v)(X)`.
pub fn j_eval<S: Scalar>(
    ray: Ray,
    p: u32,
    child: &FastExpr<S>,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64, FastError> {
    if !x.is_finite() {
        return Err(FastError::Domain(format!("non-finite argument {x}")));
    }
    check_ray(p, ray)?;
    if child.is_zero() {
        return Ok(0.0);
    }
    if let FastExpr::Monomial(k) = child {
        if *k >= 0 {
            return u_eval(p, *k as u32 + 1, ray, x, cfg);
        }
    }
    if on_ray(ray, x) && x.abs() >= 1.0 {
        let node: FastExpr<f64> = FastExpr::JApply {
            ray,
            p,
            child: std::sync::Arc::new(child.convert()),
        };
        if let Ok(a) = node.asymptotic(tail_order_for(x, p, cfg).min(80)) {
            let (v, e) = asymptotic_value(&a, x);
            if e <= cfg.abs_tol || (x.abs() >= cfg.switch_cap && e.is_finite()) {
                return Ok(v);
            }
        }
    }
    let growth = child.growth();
    ray_quadrature(p, ray, x, growth, |t| child.eval(t, cfg), cfg)
}

/// Value of `e^{−X^p}∫_0^X e^{T^p} dT`.
pub fn layer_eval(p: u32, x: f64, cfg: &QuadConfig) -> Result<f64, FastError> {
    if !x.is_finite() {
        return Err(FastError::Domain(format!("non-finite argument {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let xp = pow_p(x, p);
    if p % 2 == 1 && x < 0.0 && -xp > EXP_LIMIT {
        return Err(FastError::Domain(format!(
            "layer function overflows at X = {x}"
        )));
    }
    if (p % 2 == 0 || x > 0.0) && x.abs() >= 1.0 {
        let a: Asymptotic<f64> = crate::tail::layer_asymptotic(p, tail_order_for(x, p, cfg));
        let (v, e) = asymptotic_value(&a, x);
        if e <= cfg.abs_tol || x.abs() >= cfg.switch_cap {
            return Ok(v);
        }
    }
    // Only the stretch where T^p − X^p > −cutoff contributes.
    let lo = if p % 2 == 0 || x > 0.0 {
        let r = (xp - cfg.kernel_cutoff - 8.0).max(0.0).powf(1.0 / p as f64);
        r * x.signum()
    } else {
        0.0
    };
    let f = |t: f64| (pow_p(t, p) - xp).exp();
    let mut pts = graded_points(x, lo, p);
    pts.reverse();
    let r =
        integrate_pieces(f, &pts, &cfg.quad()).map_err(|e| FastError::Quadrature(e.to_string()))?;
    Ok(r.value)
}

/// Value of the truncated Laplace integral `∫_0^{ρ|X|} e^{−u^p} B(u/X) p u^{p−1} du`.
pub fn laplace_eval<S: Scalar>(
    d: &LaplaceData<S>,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64, FastError> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let p = d.p as f64;
    let borel: Vec<f64> = d
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let m = (i + 1) as f64;
            let c = c.to_f64();
            if c == 0.0 {
                0.0
            } else {
                c.signum() * (c.abs().ln() - ln_gamma(m / p + 1.0)).exp()
            }
        })
        .collect();
    let b = |t: f64| {
        let mut acc = 0.0;
        for c in borel.iter().rev() {
            acc = (acc + c) * t;
        }
        acc
    };
    let upper = (d.rho * x.abs()).min((cfg.kernel_cutoff + 10.0).powf(1.0 / p) + 1.0);
    let f = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        (-u.powf(p)).exp() * b(u / x) * p * u.powf(p - 1.0)
    };
    let r = integrate_pieces(f, &[0.0, upper], &cfg.quad())
        .map_err(|e| FastError::Quadrature(e.to_string()))?;
    Ok(r.value)
}

/// Value of `∫_{ray}^X v(T) dT`: tail antiderivative far out on the ray,
/// quadrature back to `X`.
pub fn integral_eval<S: Scalar>(
    ray: Ray,
    child: &FastExpr<S>,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64, FastError> {
    if !x.is_finite() {
        return Err(FastError::Domain(format!("non-finite argument {x}")));
    }
    if child.is_zero() {
        return Ok(0.0);
    }
    let node: FastExpr<f64> = FastExpr::Integral {
        ray,
        child: std::sync::Arc::new(child.convert()),
    };
    let a = node.asymptotic(60)?;
    let mut r = if on_ray(ray, x) {
        x.abs().max(2.0)
    } else {
        2.0
    };
    let (start, far) = loop {
        let s = ray.sign() * r;
        let (v, mut e) = asymptotic_value(&a, s);
        if e.is_infinite() {
            // Terms still decreasing at the stored order: bound by the last one.
            e = a
                .tail
                .coeffs
                .iter()
                .enumerate()
                .rev()
                .find(|(_, c)| **c != 0.0)
                .map_or(0.0, |(i, c)| (c * s.powi(-(i as i32) - 1)).abs());
        }
        if e <= cfg.abs_tol {
            break (s, v);
        }
        if r > 400.0 {
            return Err(FastError::NotAsymptotic(format!(
                "tail of {node} does not reach tolerance on the ray"
            )));
        }
        r *= 1.25;
    };
    if start == x {
        return Ok(far);
    }
    let pieces = ((start - x).abs().ceil() as usize).clamp(2, 64);
    let points: Vec<f64> = (0..=pieces)
        .map(|i| start + (x - start) * i as f64 / pieces as f64)
        .collect();
    let r = integrate_pieces(
        |t| child.eval(t, cfg).unwrap_or(f64::NAN),
        &points,
        &cfg.quad(),
    )
    .map_err(|e| FastError::Quadrature(e.to_string()))?;
    Ok(far + r.value)
}

/// Five-point central difference for nodes without a symbolic derivative.
pub fn finite_difference<S: Scalar>(
    e: &FastExpr<S>,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64, FastError> {
    let h = 1e-3 * x.abs().max(1.0);
    let f = |t: f64| e.eval(t, cfg);
    Ok((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn u_at_origin_is_half_gaussian() {
        let v = u_eval(2, 1, Ray::Minus, 0.0, &QuadConfig::default()).unwrap();
        assert_abs_diff_eq!(v, SQRT_PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn u_far_on_ray_follows_tail() {
        let v = u_eval(2, 1, Ray::Minus, -10.0, &QuadConfig::default()).unwrap();
        // 1/20 − 1/4000 + 3/800000 − …
        assert_abs_diff_eq!(v, 0.05 - 2.5e-4 + 3.75e-6, epsilon = 2e-7);
        let q = u_eval_quadrature(2, 1, Ray::Minus, -10.0, &QuadConfig::default()).unwrap();
        assert_abs_diff_eq!(v, q, epsilon = 1e-12);
    }

    #[test]
    fn u_decays_along_ray() {
        let v = u_eval(2, 1, Ray::Minus, -1e6, &QuadConfig::default()).unwrap();
        assert!(v.abs() < 1e-6 && v > 0.0);
    }

    #[test]
    fn u_off_ray_overflow_is_domain_error() {
        let r = u_eval(2, 1, Ray::Minus, 40.0, &QuadConfig::default());
        assert!(matches!(r, Err(FastError::Domain(_))));
    }

    #[test]
    fn odd_p_negative_ray_is_rejected() {
        assert!(u_eval(3, 1, Ray::Minus, 0.0, &QuadConfig::default()).is_err());
        assert!(u_eval(3, 1, Ray::Plus, 0.0, &QuadConfig::default()).is_ok());
    }

    #[test]
    fn switch_point_for_gaussian_is_moderate() {
        let s = switch_point(2, 1, &QuadConfig::default());
        assert!(s > 4.0 && s < 7.0, "{s}");
    }

    #[test]
    fn branches_agree_in_overlap_band() {
        let cfg = QuadConfig::default();
        let s = switch_point(2, 1, &cfg);
        for k in 0..8 {
            let x = -(s + 0.25 * k as f64);
            let (a, _) = u_eval_asymptotic(2, 1, x, &cfg);
            let q = u_eval_quadrature(2, 1, Ray::Minus, x, &cfg).unwrap();
            assert!((a - q).abs() <= 10.0 * cfg.abs_tol, "X={x}: {a} vs {q}");
        }
    }

    #[test]
    fn layer_matches_dawson_values() {
        // Dawson's integral F(1) = 0.5380795069127684.
        let cfg = QuadConfig::default();
        assert_abs_diff_eq!(
            layer_eval(2, 1.0, &cfg).unwrap(),
            0.538_079_506_912_768_4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            layer_eval(2, -1.0, &cfg).unwrap(),
            -0.538_079_506_912_768_4,
            epsilon = 1e-12
        );
        // F(10) = 0.05025384718759853.
        assert_abs_diff_eq!(
            layer_eval(2, 10.0, &cfg).unwrap(),
            0.050_253_847_187_598_53,
            epsilon = 1e-12
        );
    }
}
