//! Truncated power series in up to three variables `(x, y, ε)`.
//!
//! Coefficients live in a box `[0, dims[0]) × [0, dims[1]) × [0, dims[2])`.
//! Box truncation commutes with products, so every stored coefficient is exact.
//! Transcendental functions use the Euler derivation `D = x∂_x + y∂_y + ε∂_ε`,
//! which multiplies the coefficient of `x^i y^j ε^k` by `i + j + k`.

use dacx_num::Scalar;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    pub dims: [usize; 3],
    pub c: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn zero(dims: [usize; 3]) -> Self {
        assert!(
            dims.iter().all(|&d| d > 0),
            "jet dimensions must be positive"
        );
        Self {
            dims,
            c: vec![S::zero(); dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn constant(dims: [usize; 3], v: S) -> Self {
        let mut j = Self::zero(dims);
        j.c[0] = v;
        j
    }

    /// The variable with index `var` (0 = x, 1 = y, 2 = ε).
    pub fn variable(dims: [usize; 3], var: usize) -> Self {
        let mut j = Self::zero(dims);
        let mut e = [0; 3];
        e[var] = 1;
        if e[var] < dims[var] {
            let i = j.idx(e);
            j.c[i] = S::one();
        }
        j
    }

    fn idx(&self, a: [usize; 3]) -> usize {
        (a[0] * self.dims[1] + a[1]) * self.dims[2] + a[2]
    }

    fn multi(&self, i: usize) -> [usize; 3] {
        let k = i % self.dims[2];
        let r = i / self.dims[2];
        [r / self.dims[1], r % self.dims[1], k]
    }

    pub fn get(&self, a: [usize; 3]) -> S {
        if (0..3).all(|v| a[v] < self.dims[v]) {
            self.c[self.idx(a)].clone()
        } else {
            S::zero()
        }
    }

    pub fn value0(&self) -> S {
        self.c[0].clone()
    }

    /// Coefficients along `x` with `y = ε = 0`.
    pub fn univariate(&self) -> Vec<S> {
        (0..self.dims[0]).map(|i| self.get([i, 0, 0])).collect()
    }

    /// `P[i][j][k]`.
    pub fn nested(&self) -> Vec<Vec<Vec<S>>> {
        (0..self.dims[0])
            .map(|i| {
                (0..self.dims[1])
                    .map(|j| (0..self.dims[2]).map(|k| self.get([i, j, k])).collect())
                    .collect()
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            dims: self.dims,
            c: self
                .c
                .iter()
                .zip(&o.c)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            dims: self.dims,
            c: self
                .c
                .iter()
                .zip(&o.c)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            dims: self.dims,
            c: self.c.iter().map(|a| -a.clone()).collect(),
        }
    }

    /// Calls `f(β, α − β)` for every `β ≤ α` in the box.
    fn for_splits(&self, a: [usize; 3], mut f: impl FnMut(usize, usize)) {
        for i in 0..=a[0] {
            for j in 0..=a[1] {
                for k in 0..=a[2] {
                    f(
                        self.idx([i, j, k]),
                        self.idx([a[0] - i, a[1] - j, a[2] - k]),
                    );
                }
            }
        }
    }

    fn degree(&self, i: usize) -> i64 {
        self.multi(i).iter().sum::<usize>() as i64
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.dims);
        for n in 0..self.c.len() {
            let a = self.multi(n);
            let mut acc = S::zero();
            self.for_splits(a, |b, r| {
                if !self.c[b].is_zero() && !o.c[r].is_zero() {
                    acc = acc.clone() + self.c[b].clone() * o.c[r].clone();
                }
            });
            out.c[n] = acc;
        }
        out
    }

    /// `1/self`; needs a nonzero constant term.
    pub fn recip(&self) -> Result<Self, CliError> {
        let s0 = self.value0();
        if s0.is_zero() {
            return Err(CliError::Domain(
                "division by an expression that vanishes at the origin".into(),
            ));
        }
        let mut out = Self::zero(self.dims);
        out.c[0] = S::one() / s0.clone();
        for n in 1..self.c.len() {
            let a = self.multi(n);
            let mut acc = S::zero();
            self.for_splits(a, |b, r| {
                if b != 0 && !self.c[b].is_zero() {
                    acc = acc.clone() + self.c[b].clone() * out.c[r].clone();
                }
            });
            out.c[n] = -acc / s0.clone();
        }
        Ok(out)
    }

    pub fn div(&self, o: &Self) -> Result<Self, CliError> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, n: i64) -> Result<Self, CliError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(self.dims, S::one());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// `Σ_{0<β≤α} |β| s_β t_{α−β}` for the Euler recurrences.
    fn euler_conv(&self, t: &[S], a: [usize; 3]) -> S {
        let mut acc = S::zero();
        self.for_splits(a, |b, r| {
            if b != 0 && !self.c[b].is_zero() {
                acc = acc.clone() + S::from_i64(self.degree(b)) * self.c[b].clone() * t[r].clone();
            }
        });
        acc
    }

    pub fn exp(&self) -> Self {
        let s0 = self.value0();
        let mut out = Self::zero(self.dims);
        out.c[0] = s0.exp_s().unwrap_or_else(|| S::from_f64(s0.to_f64().exp()));
        for n in 1..self.c.len() {
            let v = self.euler_conv(&out.c, self.multi(n));
            out.c[n] = v / S::from_i64(self.degree(n));
        }
        out
    }

    /// `(sin self, cos self)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let s0 = self.value0();
        let mut sn = Self::zero(self.dims);
        let mut cs = Self::zero(self.dims);
        sn.c[0] = s0.sin_s().unwrap_or_else(|| S::from_f64(s0.to_f64().sin()));
        cs.c[0] = s0.cos_s().unwrap_or_else(|| S::from_f64(s0.to_f64().cos()));
        for n in 1..self.c.len() {
            let a = self.multi(n);
            let d = S::from_i64(self.degree(n));
            let vs = self.euler_conv(&cs.c, a);
            let vc = self.euler_conv(&sn.c, a);
            sn.c[n] = vs / d.clone();
            cs.c[n] = -vc / d;
        }
        (sn, cs)
    }

    pub fn ln(&self) -> Result<Self, CliError> {
        let s0 = self.value0();
        if s0.to_f64() <= 0.0 {
            return Err(CliError::Domain(format!(
                "log of a value ≤ 0 at the origin ({s0})"
            )));
        }
        let mut out = Self::zero(self.dims);
        out.c[0] = s0.ln_s().unwrap_or_else(|| S::from_f64(s0.to_f64().ln()));
        for n in 1..self.c.len() {
            let a = self.multi(n);
            let d = self.degree(n);
            // s_0 |α| l_α = |α| s_α − Σ_{0<β<α} s_β |α−β| l_{α−β}
            let mut acc = S::from_i64(d) * self.c[n].clone();
            self.for_splits(a, |b, r| {
                if b != 0 && r != 0 && !self.c[b].is_zero() {
                    acc = acc.clone()
                        - self.c[b].clone() * S::from_i64(self.degree(r)) * out.c[r].clone();
                }
            });
            out.c[n] = acc / (s0.clone() * S::from_i64(d));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dacx_num::Rational;

    fn x(n: usize) -> Jet<Rational> {
        Jet::variable([n, 1, 1], 0)
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::ratio(a, b)
    }

    #[test]
    fn exp_of_x_has_factorial_coefficients() {
        let e = x(6).exp().univariate();
        assert_eq!(
            e,
            vec![q(1, 1), q(1, 1), q(1, 2), q(1, 6), q(1, 24), q(1, 120)]
        );
    }

    #[test]
    fn sin_and_cos_match_their_series() {
        let (s, c) = x(6).sin_cos();
        assert_eq!(
            s.univariate(),
            vec![q(0, 1), q(1, 1), q(0, 1), q(-1, 6), q(0, 1), q(1, 120)]
        );
        assert_eq!(
            c.univariate(),
            vec![q(1, 1), q(0, 1), q(-1, 2), q(0, 1), q(1, 24), q(0, 1)]
        );
    }

    #[test]
    fn log_inverts_exp() {
        let one = Jet::constant([6, 1, 1], q(1, 1));
        let l = one.add(&x(6)).ln().unwrap().univariate();
        assert_eq!(
            l,
            vec![q(0, 1), q(1, 1), q(-1, 2), q(1, 3), q(-1, 4), q(1, 5)]
        );
        assert!(matches!(x(6).ln(), Err(CliError::Domain(_))));
    }

    #[test]
    fn reciprocal_of_geometric_denominator() {
        let one = Jet::constant([5, 1, 1], q(1, 1));
        let r = one.sub(&x(5)).recip().unwrap().univariate();
        assert_eq!(r, vec![q(1, 1); 5]);
        assert!(x(5).recip().is_err());
    }

    #[test]
    fn trivariate_exp_factorizes() {
        let dims = [3, 3, 3];
        let s = Jet::<Rational>::variable(dims, 0)
            .add(&Jet::variable(dims, 1))
            .add(&Jet::variable(dims, 2));
        let e = s.exp();
        // exp(x + y + ε) = Σ x^i y^j ε^k / (i! j! k!)
        let f = [q(1, 1), q(1, 1), q(1, 2)];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(e.get([i, j, k]), f[i].clone() * f[j].clone() * f[k].clone());
                }
            }
        }
    }

    #[test]
    fn negative_powers_use_the_reciprocal() {
        let one = Jet::constant([4, 1, 1], q(1, 1));
        let p = one.add(&x(4)).powi(-2).unwrap().univariate();
        assert_eq!(p, vec![q(1, 1), q(-2, 1), q(3, 1), q(-4, 1)]);
    }
}
