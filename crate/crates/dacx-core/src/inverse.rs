//! Reciprocals of combined series.
//!
//! With `(N, M)` the position of the first nonzero inner coefficient and
//! its valuation, `η^k/y` has a combined expansion iff every later inner
//! coefficient satisfies `val(h_n) ≥ M − n + N`. Then
//! `z = η^{−k} x^ℓ y` with `k = N + M`, `ℓ = M` has an invertible leading
//! term and `1/z` is obtained from the inverted outer and inner expansions.

use dacx_fastfn::{Asymptotic, FastTail};
use dacx_num::Scalar;

use crate::matching::{
    extract_inner, extract_outer, match_reconstruct, InnerSeq, LaurentCoeff, LaurentSeq,
};
use crate::series::{CombinedSeries, FastCoefficient, SlowSeries};
use crate::CoreError;

/// Outcome of the reciprocal test.
#[derive(Debug, Clone, PartialEq)]
pub enum InverseClass<S> {
    /// `reciprocal` is the expansion of `η^k / (x^ℓ y)`; its fast parts are tails only.
    Invertible {
        k: usize,
        ell: i64,
        reciprocal: CombinedSeries<S>,
    },
    /// `val(h_n) < bound = M − n + N`.
    SupportViolation {
        n: usize,
        valuation: i64,
        bound: i64,
    },
    /// Every inner coefficient vanishes within the truncation.
    Degenerate,
}

/// `Σ c[i] x^{low+i}`, known for powers below `low + c.len()`.
#[derive(Debug, Clone)]
struct Laurent<S> {
    low: i64,
    c: Vec<S>,
}

impl<S: Scalar> Laurent<S> {
    fn top(&self) -> i64 {
        self.low + self.c.len() as i64
    }

    fn val(&self) -> i64 {
        self.c
            .iter()
            .position(|v| !v.is_zero())
            .map_or(self.top(), |i| self.low + i as i64)
    }

    fn get(&self, m: i64) -> S {
        if m < self.low {
            S::zero()
        } else {
            self.c
                .get((m - self.low) as usize)
                .cloned()
                .unwrap_or_else(S::zero)
        }
    }

    fn from_coeff(c: &LaurentCoeff<S>) -> Self {
        let mut v: Vec<S> = c.polar.iter().rev().cloned().collect();
        v.extend(c.regular.coeffs.iter().cloned());
        Self {
            low: -(c.polar.len() as i64),
            c: v,
        }
    }

    fn shift(&self, s: i64) -> Self {
        Self {
            low: self.low + s,
            c: self.c.clone(),
        }
    }

    fn from_range(low: i64, top: i64, f: impl Fn(i64) -> S) -> Self {
        let top = top.max(low);
        Self {
            low,
            c: (low..top).map(f).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let top = (self.top() + o.val()).min(o.top() + self.val());
        Self::from_range(self.low + o.low, top, |m| {
            let mut acc = S::zero();
            for i in self.low..self.top() {
                let a = self.get(i);
                if !a.is_zero() {
                    acc = acc + a * o.get(m - i);
                }
            }
            acc
        })
    }

    fn add(&self, o: &Self) -> Self {
        Self::from_range(self.low.min(o.low), self.top().min(o.top()), |m| {
            self.get(m) + o.get(m)
        })
    }

    fn scale(&self, s: &S) -> Self {
        Self {
            low: self.low,
            c: self.c.iter().map(|v| v.clone() * s.clone()).collect(),
        }
    }

    /// Reciprocal of a germ regular at 0 with nonzero constant term.
    fn recip(&self) -> Option<Self> {
        if (self.low..0).any(|m| !self.get(m).is_zero()) || self.get(0).is_zero() || self.top() <= 0
        {
            return None;
        }
        let a: Vec<S> = (0..self.top()).map(|m| self.get(m)).collect();
        let inv0 = S::one() / a[0].clone();
        let mut r = vec![inv0.clone()];
        for m in 1..a.len() {
            let mut acc = S::zero();
            for j in 1..=m {
                acc = acc + a[j].clone() * r[m - j].clone();
            }
            r.push(-acc * inv0.clone());
        }
        Some(Self { low: 0, c: r })
    }

    fn into_coeff(self, n: usize) -> Result<LaurentCoeff<S>, CoreError> {
        if (self.low..-(n as i64)).any(|m| !self.get(m).is_zero()) {
            return Err(CoreError::Precondition(format!(
                "reciprocal outer term {n} has a pole of order > {n}"
            )));
        }
        let polar = (1..=n as i64).map(|k| self.get(-k)).collect();
        let regular = SlowSeries::new((0..self.top().max(0)).map(|m| self.get(m)).collect());
        Ok(LaurentCoeff { polar, regular })
    }
}

fn asym<S: Scalar>(h: &FastCoefficient<S>) -> Asymptotic<S> {
    Asymptotic {
        poly: h.poly.clone(),
        tail: h.tail.clone(),
    }
}

/// Formal reciprocal of `c + Σ t_m X^{−m}` with `c ≠ 0`.
fn asym_recip<S: Scalar>(a: &Asymptotic<S>) -> Option<Asymptotic<S>> {
    if a.degree() != Some(0) {
        return None;
    }
    let inv0 = S::one() / a.coeff(0);
    let mut r = vec![inv0.clone()];
    for m in 1..=a.order() {
        let mut acc = S::zero();
        for j in 1..=m {
            acc = acc + a.coeff(-(j as i64)) * r[m - j].clone();
        }
        r.push(-acc * inv0.clone());
    }
    Some(Asymptotic {
        poly: vec![r[0].clone()],
        tail: FastTail::new(r[1..].to_vec()),
    })
}

/// Inverts `Σ u_n η^n` given `u_0^{−1}`, with a ring supplied by closures.
fn invert_eta<T: Clone>(
    u: &[T],
    inv0: T,
    mul: impl Fn(&T, &T) -> T,
    add: impl Fn(&T, &T) -> T,
    neg: impl Fn(&T) -> T,
) -> Vec<T> {
    let mut w = vec![inv0.clone()];
    for n in 1..u.len() {
        let mut acc = mul(&u[1], &w[n - 1]);
        for j in 2..=n {
            acc = add(&acc, &mul(&u[j], &w[n - j]));
        }
        w.push(neg(&mul(&inv0, &acc)));
    }
    w
}

/// Decides whether `η^k/y` has a combined expansion and, if so, builds it.
pub fn invert_classify<S: Scalar>(y: &CombinedSeries<S>) -> Result<InverseClass<S>, CoreError> {
    let inner = extract_inner(y);
    let outer = extract_outer(y);
    let degs: Vec<Option<i64>> = inner.terms.iter().map(|h| asym(h).degree()).collect();
    let Some(n0) = degs.iter().position(|d| d.is_some()) else {
        return Ok(InverseClass::Degenerate);
    };
    let m0 = -degs[n0].unwrap();
    for (n, d) in degs.iter().enumerate().skip(n0 + 1) {
        if let Some(d) = d {
            let bound = m0 - n as i64 + n0 as i64;
            if -d < bound {
                return Ok(InverseClass::SupportViolation {
                    n,
                    valuation: -d,
                    bound,
                });
            }
        }
    }
    let k = (n0 as i64 + m0) as usize;
    if k >= outer.terms.len() {
        return Err(CoreError::Empty(
            "too few outer levels to normalize the reciprocal",
        ));
    }

    // z = η^{−k} x^ℓ y: outer c^z_j = x^M c_{j+k}, inner h^z_j = X^M h_{j+N}.
    let cz: Vec<Laurent<S>> = outer.terms[k..]
        .iter()
        .map(|c| Laurent::from_coeff(c).shift(m0))
        .collect();
    let hz: Vec<Asymptotic<S>> = inner.terms[n0..]
        .iter()
        .map(|h| asym(h).mul_monomial(m0))
        .collect();

    let c_inv0 = cz[0].recip().ok_or_else(|| {
        CoreError::Precondition("normalized outer leading term not invertible".into())
    })?;
    let w_outer = invert_eta(
        &cz,
        c_inv0,
        |a, b| a.mul(b),
        |a, b| a.add(b),
        |a| a.scale(&-S::one()),
    );
    let h_inv0 = asym_recip(&hz[0]).ok_or_else(|| {
        CoreError::Precondition("normalized inner leading term not invertible".into())
    })?;
    let w_inner = invert_eta(
        &hz,
        h_inv0,
        |a, b| a.mul(b),
        |a, b| a.add(b),
        |a| a.scale(&-S::one()),
    );

    let outer_w = LaurentSeq {
        terms: w_outer
            .into_iter()
            .enumerate()
            .map(|(n, l)| l.into_coeff(n))
            .collect::<Result<_, _>>()?,
    };
    let inner_w = InnerSeq {
        p: y.p,
        terms: w_inner
            .into_iter()
            .map(|a| FastCoefficient {
                tail: a.tail,
                expr: None,
                poly: a.poly,
            })
            .collect(),
    };
    let reciprocal = match_reconstruct(&outer_w, &inner_w)?;
    Ok(InverseClass::Invertible {
        k,
        ell: m0,
        reciprocal,
    })
}
