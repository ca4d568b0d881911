//! Asymptotic tails at infinity and the formal recursions that produce them.

use dacx_num::Scalar;

/// Coefficients `g_1..g_M` of `g(X) ~ Σ g_m X^{−m}`; no constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct FastTail<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> FastTail<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            coeffs: vec![S::zero(); order],
        }
    }

    /// Truncation order `M`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `g_m` for `m ≥ 1`; zero past the truncation order.
    pub fn get(&self, m: usize) -> S {
        if m == 0 {
            return S::zero();
        }
        self.coeffs.get(m - 1).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `T g = X g − g_1`: coefficients `g_{ν+1}`, order `M − 1`.
    pub fn shift(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().skip(1).cloned().collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            coeffs: self.coeffs.iter().take(order).cloned().collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|g| g.clone() * c.clone()).collect(),
        }
    }

    /// Coefficient-wise sum truncated at the smaller order.
    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// Partial sum `Σ_{m ≤ upto} g_m X^{−m}`.
    pub fn partial_sum(&self, x: f64, upto: usize) -> f64 {
        let inv = 1.0 / x;
        let mut acc = 0.0;
        let mut pw = inv;
        for g in self.coeffs.iter().take(upto) {
            acc += g.to_f64() * pw;
            pw *= inv;
        }
        acc
    }

    /// Sum up to the smallest term (optimal truncation).
    ///
    /// Returns the value and the magnitude of the first omitted term, which
    /// serves as the error estimate (`∞` if the stored order ran out first).
    pub fn optimal_sum(&self, x: f64) -> (f64, f64) {
        optimal_sum_f64(
            &self.coeffs.iter().map(|c| c.to_f64()).collect::<Vec<_>>(),
            x,
        )
    }
}

/// Optimal-truncation summation of `Σ c_m X^{−m}` (coefficients from `m = 1`).
///
/// Zero coefficients are skipped when comparing term sizes, so tails with
/// gaps (as for `p > 2`) are not cut early. Returns the value and the size of
/// the first omitted nonzero term, or `∞` if the stored terms never started
/// to grow.
pub fn optimal_sum_f64(coeffs: &[f64], x: f64) -> (f64, f64) {
    let inv = 1.0 / x;
    let mut pw = inv;
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    for c in coeffs {
        let t = c * pw;
        pw *= inv;
        if t == 0.0 {
            continue;
        }
        if t.abs() > last {
            return (acc, t.abs());
        }
        acc += t;
        last = t.abs();
    }
    (acc, f64::INFINITY)
}

/// Laurent-type asymptotic expansion `Σ_{k ≤ d} c_k X^k`: a polynomial part and a tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Asymptotic<S> {
    /// Coefficients of `X^0..X^d`.
    pub poly: Vec<S>,
    pub tail: FastTail<S>,
}

impl<S: Scalar> Asymptotic<S> {
    pub fn zero(order: usize) -> Self {
        Self {
            poly: Vec::new(),
            tail: FastTail::zeros(order),
        }
    }

    pub fn from_tail(tail: FastTail<S>) -> Self {
        Self {
            poly: Vec::new(),
            tail,
        }
    }

    pub fn monomial(k: i64, order: usize) -> Self {
        let mut a = Self::zero(order);
        a.set(k, S::one());
        a
    }

    /// Truncation order of the tail.
    pub fn order(&self) -> usize {
        self.tail.order()
    }

    /// Highest power with a nonzero coefficient (`None` if everything vanishes).
    pub fn degree(&self) -> Option<i64> {
        if let Some(d) = self.poly.iter().rposition(|c| !c.is_zero()) {
            return Some(d as i64);
        }
        self.tail
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|m| -(m as i64) - 1)
    }

    /// Coefficient of `X^k`; zero outside the stored range.
    pub fn coeff(&self, k: i64) -> S {
        if k >= 0 {
            self.poly.get(k as usize).cloned().unwrap_or_else(S::zero)
        } else {
            self.tail.get((-k) as usize)
        }
    }

    /// Sets the coefficient of `X^k`, growing the polynomial part if needed.
    /// Tail entries past the truncation order are ignored.
    pub fn set(&mut self, k: i64, v: S) {
        if k >= 0 {
            let k = k as usize;
            if self.poly.len() <= k {
                self.poly.resize(k + 1, S::zero());
            }
            self.poly[k] = v;
        } else {
            let m = (-k) as usize;
            if m <= self.tail.coeffs.len() {
                self.tail.coeffs[m - 1] = v;
            }
        }
    }

    fn trim(mut self) -> Self {
        while self.poly.last().is_some_and(|c| c.is_zero()) {
            self.poly.pop();
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let deg = self.poly.len().max(other.poly.len());
        let mut out = Self::zero(order);
        for k in 0..deg as i64 {
            out.set(k, self.coeff(k) + other.coeff(k));
        }
        for m in 1..=order as i64 {
            out.set(-m, self.coeff(-m) + other.coeff(-m));
        }
        out.trim()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            poly: self.poly.iter().map(|v| v.clone() * c.clone()).collect(),
            tail: self.tail.scale(c),
        }
        .trim()
    }

    /// Product. The tail order is limited by the other factor's degree.
    pub fn mul(&self, other: &Self) -> Self {
        let da = self.poly.len() as i64 - 1;
        let db = other.poly.len() as i64 - 1;
        // Error of a is O(X^{−Ma−1}); multiplied by b's top power X^{db}
        // (or X^{−1} when b is a pure tail).
        let ea = self.order() as i64 + 1 - db.max(-1);
        let eb = other.order() as i64 + 1 - da.max(-1);
        let order = (ea.min(eb) - 1).max(0) as usize;
        let mut out = Self::zero(order);
        let top = (da.max(-1) + db.max(-1)).max(0);
        let lo_a = -(self.order() as i64);
        let lo_b = -(other.order() as i64);
        for k in (-(order as i64)..=top).rev() {
            let mut acc = S::zero();
            let mut any = false;
            for i in lo_a..=da.max(-1) {
                let j = k - i;
                if j < lo_b || j > db.max(-1) {
                    continue;
                }
                let a = self.coeff(i);
                if a.is_zero() {
                    continue;
                }
                let b = other.coeff(j);
                if b.is_zero() {
                    continue;
                }
                acc = acc + a * b;
                any = true;
            }
            if any {
                out.set(k, acc);
            }
        }
        out.trim()
    }

    /// Termwise derivative; the tail order grows by one.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.order() + 1);
        for k in 1..self.poly.len() as i64 {
            out.set(k - 1, self.coeff(k) * S::from_i64(k));
        }
        // (g')_{m+1} = −m g_m
        for m in 1..=self.order() as i64 {
            out.set(-m - 1, self.coeff(-m) * S::from_i64(-m));
        }
        out.trim()
    }

    /// `X·g − g_1`.
    pub fn t_shift(&self) -> Self {
        let order = self.order().saturating_sub(1);
        let mut out = Self::zero(order);
        for k in 0..self.poly.len() as i64 {
            out.set(k + 1, self.coeff(k));
        }
        for m in 1..=order as i64 {
            out.set(-m, self.coeff(-m - 1));
        }
        out.trim()
    }

    /// Multiplies by `X^s` for an integer shift `s`.
    pub fn mul_monomial(&self, s: i64) -> Self {
        let order = (self.order() as i64 - s).max(0) as usize;
        let mut out = Self::zero(order);
        for k in (-(self.order() as i64))..self.poly.len() as i64 {
            if k == 0 && self.poly.is_empty() {
                continue;
            }
            out.set(k + s, self.coeff(k));
        }
        out.trim()
    }

    /// Partial sum of polynomial part plus tail terms up to `X^{−upto}`.
    pub fn partial_sum(&self, x: f64, upto: usize) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.poly.iter().enumerate() {
            acc += c.to_f64() * x.powi(k as i32);
        }
        acc + self.tail.partial_sum(x, upto)
    }
}

/// Formal solution of `W' = σ p X^{p−1} W + v` without exponential part.
///
/// Matching powers of `X` gives `c_k = σ((k+p) c_{k+p} − v_{k+p−1})/p`,
/// run downward from the top degree `deg(v) − p + 1`. The tail of the result
/// has order `order`; `v` must be known down to `X^{−(order − p + 1)}`.
pub fn formal_ode_solution<S: Scalar>(
    p: u32,
    sigma: i64,
    v: &Asymptotic<S>,
    order: usize,
) -> Asymptotic<S> {
    let p = p as i64;
    let mut out = Asymptotic::zero(order);
    let Some(dv) = v.degree() else {
        return out;
    };
    let top = dv - p + 1;
    let bottom = -(order as i64);
    if top < bottom {
        return out;
    }
    let mut c: Vec<S> = vec![S::zero(); (top - bottom + 1) as usize];
    let idx = |k: i64| (k - bottom) as usize;
    let pp = S::from_i64(p);
    let sg = S::from_i64(sigma);
    for k in (bottom..=top).rev() {
        let above = if k + p <= top {
            c[idx(k + p)].clone() * S::from_i64(k + p)
        } else {
            S::zero()
        };
        let val = sg.clone() * (above - v.coeff(k + p - 1)) / pp.clone();
        c[idx(k)] = val;
    }
    for k in bottom..=top {
        out.set(k, c[idx(k)].clone());
    }
    out.trim()
}

/// Asymptotic tail of `U_j(X) = e^{X^p}∫_{±∞}^X e^{−T^p} T^{j−1} dT`.
///
/// The recursion is the same on both rays, so the ray does not enter; it is
/// kept in the signature for symmetry with evaluation.
pub fn u_asymptotic<S: Scalar>(p: u32, j: u32, order: usize) -> Asymptotic<S> {
    let v = Asymptotic::monomial(j as i64 - 1, order + p as usize);
    formal_ode_solution(p, 1, &v, order)
}

/// Asymptotic tail of `L(X) = e^{−X^p}∫_0^X e^{T^p} dT`.
pub fn layer_asymptotic<S: Scalar>(p: u32, order: usize) -> Asymptotic<S> {
    let v = Asymptotic::monomial(0, order + p as usize);
    formal_ode_solution(p, -1, &v, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dacx_num::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn gaussian_u_tail() {
        let a = u_asymptotic::<Rational>(2, 1, 5);
        assert!(a.poly.is_empty());
        assert_eq!(
            a.tail.coeffs,
            vec![q(-1, 2), q(0, 1), q(1, 4), q(0, 1), q(-3, 8)]
        );
    }

    #[test]
    fn quartic_u_tail_leading_term() {
        let a = u_asymptotic::<Rational>(4, 1, 7);
        assert_eq!(a.tail.get(1), q(0, 1));
        assert_eq!(a.tail.get(2), q(0, 1));
        assert_eq!(a.tail.get(3), q(-1, 4));
        // next: c_{−7} = (−3)(−1/4)/4
        assert_eq!(a.tail.get(7), q(3, 16));
    }

    #[test]
    fn u_with_j_equal_p_is_constant() {
        let a = u_asymptotic::<Rational>(2, 2, 6);
        assert_eq!(a.poly, vec![q(-1, 2)]);
        assert!(a.tail.is_zero());
    }

    #[test]
    fn layer_tail_matches_dawson_expansion() {
        let a = layer_asymptotic::<Rational>(2, 5);
        assert_eq!(
            a.tail.coeffs,
            vec![q(1, 2), q(0, 1), q(1, 4), q(0, 1), q(3, 8)]
        );
    }

    #[test]
    fn product_with_monomial_moves_into_polynomial_part() {
        let u = u_asymptotic::<Rational>(2, 1, 5);
        let x = Asymptotic::monomial(1, 10);
        let prod = x.mul(&u);
        assert_eq!(prod.poly, vec![q(-1, 2)]);
        assert_eq!(prod.tail.get(1), q(0, 1));
        assert_eq!(prod.tail.get(2), q(1, 4));
        assert_eq!(prod.order(), 4);
    }

    #[test]
    fn derivative_rule() {
        let t = Asymptotic::from_tail(FastTail::new(vec![q(2, 1), q(3, 1)]));
        let d = t.derivative();
        assert_eq!(d.tail.coeffs, vec![q(0, 1), q(-2, 1), q(-6, 1)]);
    }

    #[test]
    fn t_shift_drops_first_coefficient() {
        let t = FastTail::new(vec![q(-1, 2), q(0, 1), q(1, 4)]);
        assert_eq!(t.shift().coeffs, vec![q(0, 1), q(1, 4)]);
        let a = Asymptotic::from_tail(t).t_shift();
        assert!(a.poly.is_empty());
        assert_eq!(a.tail.coeffs, vec![q(0, 1), q(1, 4)]);
    }

    #[test]
    fn optimal_sum_stops_at_smallest_term() {
        let coeffs: Vec<f64> = u_asymptotic::<f64>(2, 1, 80).tail.coeffs;
        let (v, err) = optimal_sum_f64(&coeffs, -3.0);
        assert!(err < 1e-3 && err > 0.0);
        assert!((v - 0.158636).abs() < 1e-3);
    }
}
