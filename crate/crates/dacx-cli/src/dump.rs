//! Lossless JSON form of a combined expansion.
//!
//! Rational coefficients are written as `"a/b"` strings, floats as 17-digit
//! strings, so `expand` followed by `eval` reproduces the in-memory values.

use std::sync::Arc;

use dacx_core::{CombinedSeries, FastCoefficient, SlowSeries, Term};
use dacx_fastfn::{FastExpr, FastTail, LaplaceData, Ray};
use dacx_num::{Rational, Scalar};
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const EXPANSION_SCHEMA: &str = "dacx-expansion/1";

/// Scalars with a lossless text form.
pub trait TextScalar: Scalar {
    const NAME: &'static str;
    fn encode(&self) -> String;
    fn decode(s: &str) -> Option<Self>;
}

impl TextScalar for Rational {
    const NAME: &'static str = "rational";

    fn encode(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn decode(s: &str) -> Option<Self> {
        match s.split_once('/') {
            Some((n, d)) => {
                let (n, d) = (
                    n.trim().parse().ok()?,
                    d.trim().parse::<num_bigint::BigInt>().ok()?,
                );
                (d != num_bigint::BigInt::from(0)).then(|| Rational::new(n, d))
            }
            None => Some(Rational::from_integer(s.trim().parse().ok()?)),
        }
    }
}

impl TextScalar for f64 {
    const NAME: &'static str = "f64";

    fn encode(&self) -> String {
        format!("{self:.16e}")
    }

    fn decode(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

fn ray_name(r: Ray) -> &'static str {
    match r {
        Ray::Minus => "minus",
        Ray::Plus => "plus",
    }
}

fn coeffs<S: TextScalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(|c| Value::String(c.encode())).collect())
}

pub fn expr_to_json<S: TextScalar>(e: &FastExpr<S>) -> Value {
    match e {
        FastExpr::Zero => json!({"op": "zero"}),
        FastExpr::Monomial(k) => json!({"op": "monomial", "k": k}),
        FastExpr::ExpPow { sign, p } => json!({"op": "exp_pow", "sign": sign, "p": p}),
        FastExpr::SpecialU { p, j, ray } => {
            json!({"op": "u", "p": p, "j": j, "ray": ray_name(*ray)})
        }
        FastExpr::JApply { ray, p, child } => {
            json!({"op": "j_apply", "p": p, "ray": ray_name(*ray), "child": expr_to_json(child)})
        }
        FastExpr::Layer { p } => json!({"op": "layer", "p": p}),
        FastExpr::Sum(v) => {
            json!({"op": "sum", "items": v.iter().map(expr_to_json).collect::<Vec<_>>()})
        }
        FastExpr::Scale(c, child) => {
            json!({"op": "scale", "c": c.encode(), "child": expr_to_json(child)})
        }
        FastExpr::Product(v) => {
            json!({"op": "product", "items": v.iter().map(expr_to_json).collect::<Vec<_>>()})
        }
        FastExpr::Derivative(child) => json!({"op": "derivative", "child": expr_to_json(child)}),
        FastExpr::TShift(child) => json!({"op": "t_shift", "child": expr_to_json(child)}),
        FastExpr::Laplace(d) => {
            json!({"op": "laplace", "p": d.p, "rho": d.rho, "coeffs": coeffs(&d.coeffs)})
        }
        FastExpr::Integral { ray, child } => {
            json!({"op": "integral", "ray": ray_name(*ray), "child": expr_to_json(child)})
        }
        FastExpr::LogDeriv { p } => json!({"op": "log_deriv", "p": p}),
    }
}

fn bad(what: impl std::fmt::Display) -> CliError {
    CliError::Schema(format!("expansion document: {what}"))
}

fn field<'a>(o: &'a Map<String, Value>, k: &str) -> Result<&'a Value, CliError> {
    o.get(k).ok_or_else(|| bad(format!("missing {k:?}")))
}

fn uint(o: &Map<String, Value>, k: &str) -> Result<u32, CliError> {
    field(o, k)?
        .as_u64()
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| bad(format!("{k:?} must be a small unsigned integer")))
}

fn ray_of(o: &Map<String, Value>) -> Result<Ray, CliError> {
    match field(o, "ray")?.as_str() {
        Some("minus") => Ok(Ray::Minus),
        Some("plus") => Ok(Ray::Plus),
        other => Err(bad(format!("unknown ray {other:?}"))),
    }
}

fn scalar<S: TextScalar>(v: &Value) -> Result<S, CliError> {
    v.as_str()
        .and_then(S::decode)
        .ok_or_else(|| bad(format!("{v} is not a {} coefficient", S::NAME)))
}

fn scalars<S: TextScalar>(v: &Value) -> Result<Vec<S>, CliError> {
    v.as_array()
        .ok_or_else(|| bad("expected a coefficient array"))?
        .iter()
        .map(scalar)
        .collect()
}

fn child<S: TextScalar>(o: &Map<String, Value>) -> Result<Arc<FastExpr<S>>, CliError> {
    Ok(Arc::new(expr_from_json(field(o, "child")?)?))
}

fn items<S: TextScalar>(o: &Map<String, Value>) -> Result<Vec<FastExpr<S>>, CliError> {
    field(o, "items")?
        .as_array()
        .ok_or_else(|| bad("\"items\" must be an array"))?
        .iter()
        .map(expr_from_json)
        .collect()
}

pub fn expr_from_json<S: TextScalar>(v: &Value) -> Result<FastExpr<S>, CliError> {
    let o = v
        .as_object()
        .ok_or_else(|| bad("fast expression must be an object"))?;
    let op = field(o, "op")?
        .as_str()
        .ok_or_else(|| bad("\"op\" must be a string"))?;
    Ok(match op {
        "zero" => FastExpr::Zero,
        "monomial" => FastExpr::Monomial(
            field(o, "k")?
                .as_i64()
                .and_then(|k| i32::try_from(k).ok())
                .ok_or_else(|| bad("\"k\" must be an integer"))?,
        ),
        "exp_pow" => FastExpr::ExpPow {
            sign: field(o, "sign")?
                .as_i64()
                .filter(|s| s.abs() == 1)
                .ok_or_else(|| bad("\"sign\" must be ±1"))? as i8,
            p: uint(o, "p")?,
        },
        "u" => FastExpr::SpecialU {
            p: uint(o, "p")?,
            j: uint(o, "j")?,
            ray: ray_of(o)?,
        },
        "j_apply" => FastExpr::JApply {
            ray: ray_of(o)?,
            p: uint(o, "p")?,
            child: child(o)?,
        },
        "layer" => FastExpr::Layer { p: uint(o, "p")? },
        "sum" => FastExpr::Sum(items(o)?),
        "scale" => FastExpr::Scale(scalar(field(o, "c")?)?, child(o)?),
        "product" => FastExpr::Product(items(o)?),
        "derivative" => FastExpr::Derivative(child(o)?),
        "t_shift" => FastExpr::TShift(child(o)?),
        "laplace" => FastExpr::Laplace(Arc::new(LaplaceData {
            p: uint(o, "p")?,
            rho: field(o, "rho")?
                .as_f64()
                .ok_or_else(|| bad("\"rho\" must be a number"))?,
            coeffs: scalars(field(o, "coeffs")?)?,
        })),
        "integral" => FastExpr::Integral {
            ray: ray_of(o)?,
            child: child(o)?,
        },
        "log_deriv" => FastExpr::LogDeriv { p: uint(o, "p")? },
        other => return Err(bad(format!("unknown fast expression {other:?}"))),
    })
}

/// `{"schema", "scalar", "p", "levels": [{"slow", "tail", "poly", "fast"}]}`.
pub fn expansion_to_json<S: TextScalar>(y: &CombinedSeries<S>, label: &str) -> Value {
    let levels: Vec<Value> = y
        .terms
        .iter()
        .map(|t| {
            json!({
                "slow": coeffs(&t.slow.coeffs),
                "tail": coeffs(&t.fast.tail.coeffs),
                "poly": coeffs(&t.fast.poly),
                "fast": t.fast.expr.as_ref().map_or(Value::Null, expr_to_json),
            })
        })
        .collect();
    json!({"schema": EXPANSION_SCHEMA, "scalar": S::NAME, "label": label, "p": y.p, "levels": levels})
}

pub fn expansion_from_json<S: TextScalar>(v: &Value) -> Result<CombinedSeries<S>, CliError> {
    let o = v
        .as_object()
        .ok_or_else(|| bad("top level must be an object"))?;
    if field(o, "schema")?.as_str() != Some(EXPANSION_SCHEMA) {
        return Err(bad(format!("schema must be {EXPANSION_SCHEMA:?}")));
    }
    let kind = field(o, "scalar")?.as_str().unwrap_or_default();
    if kind != S::NAME {
        return Err(bad(format!(
            "scalar field is {kind:?}, expected {:?}",
            S::NAME
        )));
    }
    let p = uint(o, "p")?;
    let mut terms = Vec::new();
    for lv in field(o, "levels")?
        .as_array()
        .ok_or_else(|| bad("\"levels\" must be an array"))?
    {
        let lo = lv
            .as_object()
            .ok_or_else(|| bad("level must be an object"))?;
        let fast = match field(lo, "fast")? {
            Value::Null => None,
            e => Some(expr_from_json(e)?),
        };
        terms.push(Term {
            slow: SlowSeries::new(scalars(field(lo, "slow")?)?),
            fast: FastCoefficient {
                tail: FastTail::new(scalars(field(lo, "tail")?)?),
                expr: fast,
                poly: scalars(field(lo, "poly")?)?,
            },
        });
    }
    Ok(CombinedSeries::new(p, terms)?)
}

/// Reads a document of either scalar kind as `f64`.
pub fn expansion_from_json_f64(v: &Value) -> Result<CombinedSeries<f64>, CliError> {
    match v.get("scalar").and_then(Value::as_str) {
        Some("rational") => Ok(expansion_from_json::<Rational>(v)?.convert()),
        _ => expansion_from_json::<f64>(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FastExpr<Rational> {
        FastExpr::Sum(vec![
            FastExpr::u(2, 1, Ray::Minus).scale(Rational::ratio(-3, 7)),
            FastExpr::Product(vec![
                FastExpr::Monomial(-2),
                FastExpr::ExpPow { sign: -1, p: 2 },
            ]),
            FastExpr::Integral {
                ray: Ray::Plus,
                child: Arc::new(FastExpr::LogDeriv { p: 2 }),
            },
            FastExpr::Laplace(Arc::new(LaplaceData {
                p: 2,
                rho: 0.1 + 0.2,
                coeffs: vec![Rational::ratio(1, 3)],
            })),
            FastExpr::TShift(Arc::new(FastExpr::Derivative(Arc::new(FastExpr::Layer {
                p: 2,
            })))),
            FastExpr::JApply {
                ray: Ray::Minus,
                p: 4,
                child: Arc::new(FastExpr::Zero),
            },
        ])
    }

    #[test]
    fn fast_expressions_round_trip() {
        let e = sample();
        assert_eq!(expr_from_json::<Rational>(&expr_to_json(&e)).unwrap(), e);
        let f: FastExpr<f64> = e.convert();
        let text = serde_json::to_string(&expr_to_json(&f)).unwrap();
        assert_eq!(
            expr_from_json::<f64>(&serde_json::from_str(&text).unwrap()).unwrap(),
            f
        );
    }

    #[test]
    fn scalar_text_is_lossless() {
        for s in ["-3/7", "12", "0"] {
            assert_eq!(Rational::decode(s).unwrap().encode(), s);
        }
        assert!(Rational::decode("1/0").is_none());
        let v = 0.1f64 + 0.2;
        assert_eq!(f64::decode(&v.encode()), Some(v));
    }

    #[test]
    fn malformed_documents_are_schema_errors() {
        let bad_op = json!({"op": "tan"});
        assert!(matches!(
            expr_from_json::<f64>(&bad_op),
            Err(CliError::Schema(_))
        ));
        let wrong = json!({"schema": EXPANSION_SCHEMA, "scalar": "f64", "p": 2, "levels": []});
        assert!(expansion_from_json::<Rational>(&wrong).is_err());
    }
}
