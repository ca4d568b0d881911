//! Expression trees over fast functions.

use std::fmt;
use std::sync::Arc;

use dacx_num::Scalar;

use crate::eval::{self, QuadConfig};
use crate::tail::{formal_ode_solution, layer_asymptotic, u_asymptotic, Asymptotic};
use crate::FastError;

/// Ray at infinity along which a fast function decays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ray {
    /// `X → −∞`.
    Minus,
    /// `X → +∞`.
    Plus,
}

impl Ray {
    pub fn sign(self) -> f64 {
        match self {
            Ray::Minus => -1.0,
            Ray::Plus => 1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Ray::Minus => Ray::Plus,
            Ray::Plus => Ray::Minus,
        }
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ray::Minus => "-",
            Ray::Plus => "+",
        })
    }
}

/// Truncated Laplace integral `∫_0^{ρ|X|} e^{−u^p} B(u/X) d(u^p)` whose
/// asymptotic expansion is `Σ c_m X^{−m}` with `B(t) = Σ c_m t^m / Γ(m/p+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceData<S> {
    pub p: u32,
    pub rho: f64,
    /// `c_1..c_K` (coefficient of `X^{−m}`).
    pub coeffs: Vec<S>,
}

/// Expression over the fast variable `X`.
#[derive(Debug, Clone, PartialEq)]
pub enum FastExpr<S> {
    Zero,
    /// `X^k`.
    Monomial(i32),
    /// `e^{s·X^p}` with `s = ±1`.
    ExpPow {
        sign: i8,
        p: u32,
    },
    /// `U_j(X) = e^{X^p}∫_{ray}^X e^{−T^p} T^{j−1} dT`.
    SpecialU {
        p: u32,
        j: u32,
        ray: Ray,
    },
    /// `e^{X^p}∫_{ray}^X e^{−T^p} v(T) dT`.
    JApply {
        ray: Ray,
        p: u32,
        child: Arc<FastExpr<S>>,
    },
    /// Initial-layer function `e^{−X^p}∫_0^X e^{T^p} dT`.
    Layer {
        p: u32,
    },
    Sum(Vec<FastExpr<S>>),
    Scale(S, Arc<FastExpr<S>>),
    Product(Vec<FastExpr<S>>),
    Derivative(Arc<FastExpr<S>>),
    /// `X·g(X) − g_1`.
    TShift(Arc<FastExpr<S>>),
    Laplace(Arc<LaplaceData<S>>),
    /// `∫_{ray}^X v(T) dT` for a residue-free decaying `v`.
    Integral {
        ray: Ray,
        child: Arc<FastExpr<S>>,
    },
    /// `X^{p−1}/(X^p + 1)`, the derivative of `(1/p) log(X^p + 1)`.
    LogDeriv {
        p: u32,
    },
}

impl<S: Scalar> FastExpr<S> {
    pub fn u(p: u32, j: u32, ray: Ray) -> Self {
        FastExpr::SpecialU { p, j, ray }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FastExpr::Zero => true,
            FastExpr::Scale(c, e) => c.is_zero() || e.is_zero(),
            FastExpr::Sum(v) => v.iter().all(|e| e.is_zero()),
            FastExpr::Product(v) => v.iter().any(|e| e.is_zero()),
            FastExpr::Derivative(e) | FastExpr::TShift(e) => e.is_zero(),
            FastExpr::JApply { child, .. } | FastExpr::Integral { child, .. } => child.is_zero(),
            FastExpr::Laplace(d) => d.coeffs.iter().all(|c| c.is_zero()),
            _ => false,
        }
    }

    pub fn scale(self, c: S) -> Self {
        if c.is_zero() || self.is_zero() {
            return FastExpr::Zero;
        }
        if c == S::one() {
            return self;
        }
        match self {
            FastExpr::Scale(d, e) => FastExpr::Scale(c * d, e),
            e => FastExpr::Scale(c, Arc::new(e)),
        }
    }

    pub fn sum(items: Vec<Self>) -> Self {
        let mut out = Vec::new();
        for e in items {
            match e {
                FastExpr::Zero => {}
                FastExpr::Sum(v) => out.extend(v.into_iter().filter(|e| !e.is_zero())),
                e if e.is_zero() => {}
                e => out.push(e),
            }
        }
        match out.len() {
            0 => FastExpr::Zero,
            1 => out.pop().unwrap(),
            _ => FastExpr::Sum(out),
        }
    }

    pub fn add(self, other: Self) -> Self {
        Self::sum(vec![self, other])
    }

    pub fn product(items: Vec<Self>) -> Self {
        if items.iter().any(|e| e.is_zero()) {
            return FastExpr::Zero;
        }
        let mut out = Vec::new();
        let mut coef = S::one();
        for e in items {
            match e {
                FastExpr::Monomial(0) => {}
                FastExpr::Product(v) => out.extend(v),
                FastExpr::Scale(c, inner) => {
                    coef = coef * c;
                    out.push((*inner).clone());
                }
                e => out.push(e),
            }
        }
        let body = match out.len() {
            0 => FastExpr::Monomial(0),
            1 => out.pop().unwrap(),
            _ => FastExpr::Product(out),
        };
        body.scale(coef)
    }

    pub fn t_shift(self) -> Self {
        if self.is_zero() {
            return FastExpr::Zero;
        }
        FastExpr::TShift(Arc::new(self))
    }

    pub fn derivative(self) -> Self {
        if self.is_zero() {
            return FastExpr::Zero;
        }
        FastExpr::Derivative(Arc::new(self))
    }

    /// Upper bound on the polynomial growth exponent (`−1` for decaying expressions).
    pub fn growth(&self) -> i64 {
        match self {
            FastExpr::Zero
            | FastExpr::ExpPow { .. }
            | FastExpr::Layer { .. }
            | FastExpr::Laplace(_)
            | FastExpr::Integral { .. }
            | FastExpr::LogDeriv { .. } => -1,
            FastExpr::Monomial(k) => (*k as i64).max(-1),
            FastExpr::SpecialU { p, j, .. } => (*j as i64 - *p as i64).max(-1),
            FastExpr::JApply { p, child, .. } => (child.growth() - *p as i64 + 1).max(-1),
            FastExpr::Sum(v) => v.iter().map(|e| e.growth()).max().unwrap_or(-1),
            FastExpr::Scale(_, e) => e.growth(),
            FastExpr::Product(v) => {
                let g: i64 = v.iter().map(|e| e.growth().max(0)).sum();
                if v.iter().all(|e| e.growth() < 0) {
                    -1
                } else {
                    g
                }
            }
            FastExpr::Derivative(e) => (e.growth() - 1).max(-1),
            FastExpr::TShift(e) => e.growth() + 1,
        }
    }

    /// Asymptotic expansion at infinity with tail order `order`.
    pub fn asymptotic(&self, order: usize) -> Result<Asymptotic<S>, FastError> {
        Ok(match self {
            FastExpr::Zero => Asymptotic::zero(order),
            FastExpr::Monomial(k) => Asymptotic::monomial(*k as i64, order),
            FastExpr::ExpPow { sign, p } => {
                if *sign < 0 {
                    Asymptotic::zero(order)
                } else {
                    return Err(FastError::NotAsymptotic(format!(
                        "e^(X^{p}) grows faster than any power"
                    )));
                }
            }
            FastExpr::SpecialU { p, j, .. } => u_asymptotic(*p, *j, order),
            FastExpr::Layer { p } => layer_asymptotic(*p, order),
            FastExpr::JApply { p, child, .. } => {
                let need = (order + 1).saturating_sub(*p as usize).max(1);
                let v = child.asymptotic(need)?;
                formal_ode_solution(*p, 1, &v, order)
            }
            FastExpr::Sum(v) => {
                let mut acc = Asymptotic::zero(order);
                for e in v {
                    acc = acc.add(&e.asymptotic(order)?);
                }
                acc
            }
            FastExpr::Scale(c, e) => e.asymptotic(order)?.scale(c),
            FastExpr::Product(v) => {
                // Each factor must be known deep enough to cover the others' growth.
                let slack: i64 = v.iter().map(|e| e.growth().max(0) + 1).sum();
                let need = order + slack as usize;
                let mut acc = Asymptotic::monomial(0, need);
                for e in v {
                    acc = acc.mul(&e.asymptotic(need)?);
                }
                let mut a = acc;
                a.tail = a.tail.truncate(order);
                a
            }
            FastExpr::Derivative(e) => {
                let mut a = e.asymptotic(order.saturating_sub(1))?.derivative();
                a.tail = a.tail.truncate(order);
                a
            }
            FastExpr::TShift(e) => e.asymptotic(order + 1)?.t_shift(),
            FastExpr::Integral { child, .. } => {
                let v = child.asymptotic(order + 1)?;
                if v.degree().is_some_and(|d| d >= -1) {
                    return Err(FastError::NotAsymptotic(format!(
                        "integrand {child} is not O(X^-2)"
                    )));
                }
                let mut a = Asymptotic::zero(order);
                // ∫ T^{−m} dT = X^{1−m}/(1−m)
                for j in 1..=order as i64 {
                    a.set(-j, v.coeff(-j - 1) / S::from_i64(-j));
                }
                a
            }
            FastExpr::LogDeriv { p } => {
                let mut a = Asymptotic::zero(order);
                let mut sign = S::one();
                let mut m = 1;
                while m <= order {
                    a.set(-(m as i64), sign.clone());
                    sign = -sign;
                    m += *p as usize;
                }
                a
            }
            FastExpr::Laplace(d) => {
                let mut a = Asymptotic::zero(order);
                for (m, c) in d.coeffs.iter().enumerate().take(order) {
                    a.set(-(m as i64) - 1, c.clone());
                }
                if d.coeffs.len() < order {
                    a.tail = a.tail.truncate(d.coeffs.len());
                }
                a
            }
        })
    }

    /// Symbolic derivative, when every node has a closed rule.
    pub fn symbolic_derivative(&self) -> Option<Self> {
        Some(match self {
            FastExpr::Zero => FastExpr::Zero,
            FastExpr::Monomial(0) => FastExpr::Zero,
            FastExpr::Monomial(k) => FastExpr::Monomial(k - 1).scale(S::from_i64(*k as i64)),
            FastExpr::ExpPow { sign, p } => FastExpr::product(vec![
                FastExpr::Monomial(*p as i32 - 1),
                FastExpr::ExpPow { sign: *sign, p: *p },
            ])
            .scale(S::from_i64(*sign as i64 * *p as i64)),
            FastExpr::SpecialU { p, j, .. } => FastExpr::sum(vec![
                FastExpr::product(vec![FastExpr::Monomial(*p as i32 - 1), self.clone()])
                    .scale(S::from_i64(*p as i64)),
                FastExpr::Monomial(*j as i32 - 1),
            ]),
            FastExpr::JApply { p, child, .. } => FastExpr::sum(vec![
                FastExpr::product(vec![FastExpr::Monomial(*p as i32 - 1), self.clone()])
                    .scale(S::from_i64(*p as i64)),
                (**child).clone(),
            ]),
            FastExpr::Layer { p } => FastExpr::sum(vec![
                FastExpr::product(vec![FastExpr::Monomial(*p as i32 - 1), self.clone()])
                    .scale(S::from_i64(-(*p as i64))),
                FastExpr::Monomial(0),
            ]),
            FastExpr::Sum(v) => FastExpr::sum(
                v.iter()
                    .map(|e| e.symbolic_derivative())
                    .collect::<Option<Vec<_>>>()?,
            ),
            FastExpr::Scale(c, e) => e.symbolic_derivative()?.scale(c.clone()),
            FastExpr::Product(v) => {
                let mut terms = Vec::new();
                for i in 0..v.len() {
                    let mut factors = v.clone();
                    factors[i] = v[i].symbolic_derivative()?;
                    terms.push(FastExpr::product(factors));
                }
                FastExpr::sum(terms)
            }
            FastExpr::Derivative(e) => e.symbolic_derivative()?.symbolic_derivative()?,
            // (X g − g_1)' = g + X g'
            FastExpr::TShift(e) => FastExpr::sum(vec![
                (**e).clone(),
                FastExpr::product(vec![FastExpr::Monomial(1), e.symbolic_derivative()?]),
            ]),
            FastExpr::Integral { child, .. } => (**child).clone(),
            FastExpr::Laplace(_) | FastExpr::LogDeriv { .. } => return None,
        })
    }

    /// Numeric value at `x`.
    pub fn eval(&self, x: f64, cfg: &QuadConfig) -> Result<f64, FastError> {
        match self {
            FastExpr::Zero => Ok(0.0),
            FastExpr::Monomial(k) => {
                if *k < 0 && x == 0.0 {
                    Err(FastError::Domain(format!("X^{k} at X = 0")))
                } else {
                    Ok(x.powi(*k))
                }
            }
            FastExpr::ExpPow { sign, p } => Ok((*sign as f64 * x.powi(*p as i32)).exp()),
            FastExpr::SpecialU { p, j, ray } => eval::u_eval(*p, *j, *ray, x, cfg),
            FastExpr::JApply { ray, p, child } => eval::j_eval(*ray, *p, child, x, cfg),
            FastExpr::Layer { p } => eval::layer_eval(*p, x, cfg),
            FastExpr::Sum(v) => v.iter().map(|e| e.eval(x, cfg)).sum(),
            FastExpr::Scale(c, e) => Ok(c.to_f64() * e.eval(x, cfg)?),
            FastExpr::Product(v) => v.iter().map(|e| e.eval(x, cfg)).product(),
            FastExpr::Derivative(e) => match e.symbolic_derivative() {
                Some(d) => d.eval(x, cfg),
                None => eval::finite_difference(e, x, cfg),
            },
            FastExpr::TShift(e) => {
                let g1 = e.asymptotic(1)?.coeff(-1).to_f64();
                Ok(x * e.eval(x, cfg)? - g1)
            }
            FastExpr::Laplace(d) => eval::laplace_eval(d, x, cfg),
            FastExpr::Integral { ray, child } => eval::integral_eval(*ray, child, x, cfg),
            FastExpr::LogDeriv { p } => {
                let den = x.powi(*p as i32) + 1.0;
                if den == 0.0 {
                    return Err(FastError::Domain(format!("X^{p} + 1 vanishes at X = {x}")));
                }
                Ok(x.powi(*p as i32 - 1) / den)
            }
        }
    }

    /// Maps scalars into another field.
    pub fn convert<T: Scalar>(&self) -> FastExpr<T> {
        let c = |s: &S| dacx_num::scalar::convert::<S, T>(s);
        match self {
            FastExpr::Zero => FastExpr::Zero,
            FastExpr::Monomial(k) => FastExpr::Monomial(*k),
            FastExpr::ExpPow { sign, p } => FastExpr::ExpPow { sign: *sign, p: *p },
            FastExpr::SpecialU { p, j, ray } => FastExpr::SpecialU {
                p: *p,
                j: *j,
                ray: *ray,
            },
            FastExpr::JApply { ray, p, child } => FastExpr::JApply {
                ray: *ray,
                p: *p,
                child: Arc::new(child.convert()),
            },
            FastExpr::Layer { p } => FastExpr::Layer { p: *p },
            FastExpr::Sum(v) => FastExpr::Sum(v.iter().map(|e| e.convert()).collect()),
            FastExpr::Scale(s, e) => FastExpr::Scale(c(s), Arc::new(e.convert())),
            FastExpr::Product(v) => FastExpr::Product(v.iter().map(|e| e.convert()).collect()),
            FastExpr::Derivative(e) => FastExpr::Derivative(Arc::new(e.convert())),
            FastExpr::TShift(e) => FastExpr::TShift(Arc::new(e.convert())),
            FastExpr::Laplace(d) => FastExpr::Laplace(Arc::new(LaplaceData {
                p: d.p,
                rho: d.rho,
                coeffs: d.coeffs.iter().map(c).collect(),
            })),
            FastExpr::Integral { ray, child } => FastExpr::Integral {
                ray: *ray,
                child: Arc::new(child.convert()),
            },
            FastExpr::LogDeriv { p } => FastExpr::LogDeriv { p: *p },
        }
    }
}

impl<S: Scalar> fmt::Display for FastExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FastExpr::Zero => write!(f, "0"),
            FastExpr::Monomial(k) => write!(f, "X^{k}"),
            FastExpr::ExpPow { sign, p } => {
                write!(f, "exp({}X^{p})", if *sign < 0 { "-" } else { "" })
            }
            FastExpr::SpecialU { p, j, ray } => write!(f, "U[{p},{j},{ray}]"),
            FastExpr::JApply { ray, p, child } => write!(f, "J[{p},{ray}]({child})"),
            FastExpr::Layer { p } => write!(f, "L[{p}]"),
            FastExpr::Sum(v) => {
                write!(f, "(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            FastExpr::Scale(c, e) => write!(f, "{c}*{e}"),
            FastExpr::Product(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            FastExpr::Derivative(e) => write!(f, "D({e})"),
            FastExpr::TShift(e) => write!(f, "T({e})"),
            FastExpr::Laplace(d) => {
                write!(f, "Laplace[{},{}; {} terms]", d.p, d.rho, d.coeffs.len())
            }
            FastExpr::Integral { ray, child } => write!(f, "I[{ray}]({child})"),
            FastExpr::LogDeriv { p } => write!(f, "X^{}/(X^{p}+1)", p - 1),
        }
    }
}
