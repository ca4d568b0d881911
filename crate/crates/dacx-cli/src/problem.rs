//! Problem files: versioned JSON documents describing one equation and a sweep.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "kind": "linear-model",
//!   "p": 2,
//!   "functions": { "g": { "expr": "x + 1" } },
//!   "orders": { "N": 3, "M": 8 },
//!   "eta_list": [0.2, 0.1, 0.05, 0.025]
//! }
//! ```
//!
//! Unknown keys are rejected at every level.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use dacx_fastfn::Ray;
use dacx_harness::{GridSpec, SweepOptions};
use dacx_num::{Rational, Scalar};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::expr::{parse, Expr, Var};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    LinearModel,
    ControlledLinear,
    LinearRepulsiveAttractive,
    Quasilinear,
    UnionJackInner,
    ResonancePair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RayName {
    #[default]
    Minus,
    Plus,
}

impl From<RayName> for Ray {
    fn from(r: RayName) -> Ray {
        match r {
            RayName::Minus => Ray::Minus,
            RayName::Plus => Ray::Plus,
        }
    }
}

/// A rational coefficient: an integer, a float, or a string `"a/b"` / decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Coeff {
    pub fn to_rational(&self) -> Result<Rational, CliError> {
        match self {
            Coeff::Int(n) => Ok(Rational::from_i64(*n)),
            Coeff::Float(v) if v.is_finite() => Ok(Rational::from_f64(*v)),
            Coeff::Float(v) => Err(CliError::Schema(format!("coefficient {v} is not finite"))),
            Coeff::Text(s) => {
                let e = parse(s, &[]).map_err(|err| CliError::Syntax {
                    what: format!("coefficient {s:?}"),
                    err,
                })?;
                e.constant().ok_or_else(|| {
                    CliError::Schema(format!("coefficient {s:?} is not a finite constant"))
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaylorInput {
    Flat(Vec<Coeff>),
    Box3(Vec<Vec<Vec<Coeff>>>),
}

/// Expression and/or explicit Taylor coefficients; both are cross-checked.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taylor: Option<TaylorInput>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Orders {
    /// Number of levels.
    #[serde(rename = "N")]
    pub n: usize,
    /// Order of slow parts and fast tails.
    #[serde(rename = "M")]
    pub m: usize,
}

impl Default for Orders {
    fn default() -> Self {
        Self { n: 4, m: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_hi: Option<f64>,
    #[serde(default, rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_samples: Option<usize>,
    #[serde(default)]
    pub allow_repulsive: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_abs: Option<f64>,
    #[serde(default)]
    pub drop_largest_eta: bool,
    /// Canard shooting tolerance on `c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shoot: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatName {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<FormatName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<RayName>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionInput>,
    /// Scalar parameters: `c` (union-jack-inner), `alpha` and `beta` (resonance-pair).
    #[serde(default)]
    pub params: BTreeMap<String, Coeff>,
    #[serde(default)]
    pub orders: Orders,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

/// Function names and parameters each kind accepts, and the variables of its functions.
fn allowed(
    kind: Kind,
) -> (
    &'static [&'static str],
    &'static [&'static str],
    &'static [Var],
) {
    match kind {
        Kind::LinearModel | Kind::ControlledLinear => (&["g"], &[], &[Var::X]),
        Kind::LinearRepulsiveAttractive => (&["g", "c"], &[], &[Var::X]),
        Kind::Quasilinear => (&["P"], &[], &[Var::X, Var::Y, Var::Eps]),
        Kind::UnionJackInner => (&[], &["c"], &[]),
        Kind::ResonancePair => (&[], &["alpha", "beta"], &[]),
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let pf: ProblemFile =
            serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        pf.check()?;
        Ok(pf)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Schema(m) => CliError::Schema(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Schema checks that do not need Taylor data.
    pub fn check(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let (funcs, params, _) = allowed(self.kind);
        for name in self.functions.keys() {
            if !funcs.contains(&name.as_str()) {
                return Err(CliError::Schema(format!(
                    "unknown function {name:?} for kind {:?} (expected {funcs:?})",
                    self.kind
                )));
            }
        }
        for name in self.params.keys() {
            if !params.contains(&name.as_str()) {
                return Err(CliError::Schema(format!(
                    "unknown parameter {name:?} for kind {:?} (expected {params:?})",
                    self.kind
                )));
            }
        }
        for f in self.functions.values() {
            if f.expr.is_none() && f.taylor.is_none() {
                return Err(CliError::Schema(
                    "a function needs \"expr\", \"taylor\" or both".into(),
                ));
            }
        }
        if self.orders.n == 0 {
            return Err(CliError::Schema("orders.N must be at least 1".into()));
        }
        let p_fixed = match self.kind {
            Kind::LinearRepulsiveAttractive => Some(2),
            Kind::UnionJackInner => Some(3),
            _ => None,
        };
        match (self.p, p_fixed) {
            (Some(p), Some(f)) if p != f => {
                return Err(CliError::Schema(format!(
                    "kind {:?} has p = {f}, the file says {p}",
                    self.kind
                )));
            }
            (None, None) => {
                return Err(CliError::Schema(format!(
                    "kind {:?} needs \"p\"",
                    self.kind
                )))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn p(&self) -> u32 {
        match self.kind {
            Kind::LinearRepulsiveAttractive => 2,
            Kind::UnionJackInner => 3,
            _ => self.p.unwrap_or(2),
        }
    }

    pub fn ray(&self) -> Ray {
        self.ray.unwrap_or_default().into()
    }

    fn function(&self, name: &str) -> Result<&FunctionInput, CliError> {
        self.functions.get(name).ok_or_else(|| {
            CliError::Schema(format!("kind {:?} needs function {name:?}", self.kind))
        })
    }

    fn param(&self, name: &str) -> Result<Rational, CliError> {
        self.params
            .get(name)
            .ok_or_else(|| {
                CliError::Schema(format!("kind {:?} needs parameter {name:?}", self.kind))
            })?
            .to_rational()
    }

    /// Taylor order the solvers need from univariate data.
    fn taylor_order(&self) -> usize {
        self.orders.m + self.p() as usize * self.orders.n + 2
    }

    pub fn equation(&self) -> Result<dacx_solvers::EquationSpec, CliError> {
        use dacx_solvers::EquationSpec as E;
        let (_, _, vars) = allowed(self.kind);
        let spec = match self.kind {
            Kind::LinearModel => E::LinearModel {
                p: self.p(),
                g: slow_function("g", self.function("g")?, self.taylor_order())?,
            },
            Kind::ControlledLinear => E::ControlledLinear {
                p: self.p(),
                g: slow_function("g", self.function("g")?, self.taylor_order())?,
            },
            Kind::LinearRepulsiveAttractive => {
                let g = slow_function("g", self.function("g")?, self.taylor_order())?;
                let c = self.function("c")?;
                let c_series = match (&c.taylor, &c.expr) {
                    (Some(TaylorInput::Flat(v)), None) => v.iter().map(Coeff::to_rational).collect::<Result<Vec<_>, _>>()?,
                    _ => return Err(CliError::Schema("\"c\" is the series c(ε) = Σ c_n η^n and takes a flat \"taylor\" array only".into())),
                };
                E::LinearRepulsiveAttractive { g, c_series }
            }
            Kind::Quasilinear => {
                let n = self.orders.n + 2;
                E::QuasiLinear {
                    p: self.p(),
                    pfun: trivariate("P", self.function("P")?, [self.taylor_order(), n, n], vars)?,
                }
            }
            Kind::UnionJackInner => E::UnionJackInner {
                c: Scalar::to_f64(&self.param("c")?),
            },
            Kind::ResonancePair => E::ResonancePair {
                alpha: self.param("alpha")?,
                beta: self.param("beta")?,
                p: self.p(),
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn grid(&self) -> GridSpec {
        let d = GridSpec::default();
        let g = self.grid.clone().unwrap_or_default();
        GridSpec {
            x_lo: g.x_lo.unwrap_or(d.x_lo),
            x_hi: g.x_hi.unwrap_or(d.x_hi),
            k: g.k.unwrap_or(d.k),
            outer_samples: g.outer_samples.unwrap_or(d.outer_samples),
            inner_samples: g.inner_samples.unwrap_or(d.inner_samples),
            etas: self.eta_list.clone().unwrap_or(d.etas),
            allow_repulsive: g.allow_repulsive,
        }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        let mut o = SweepOptions::default();
        if let Some(t) = &self.tolerances {
            if let Some(s) = t.slope {
                o.slope_tolerance = s;
            }
            if let Some(e) = t.exact {
                o.exact_threshold = e;
            }
            if let Some(q) = t.quad_abs {
                o.quad.abs_tol = q;
            }
            o.drop_largest = t.drop_largest_eta;
        }
        o
    }
}

fn parse_in(name: &str, src: &str, vars: &[Var]) -> Result<Expr, CliError> {
    parse(src, vars).map_err(|err| CliError::Syntax {
        what: format!("function {name:?}"),
        err,
    })
}

/// Taylor data and value agree when `|a − b| ≤ 1e−12·max(1, |a|, |b|)`.
fn cross_check(
    name: &str,
    index: String,
    given: &Rational,
    derived: &Rational,
) -> Result<(), CliError> {
    let (a, b) = (Scalar::to_f64(given), Scalar::to_f64(derived));
    if given == derived || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
        return Ok(());
    }
    Err(CliError::Schema(format!(
        "{name}: taylor{index} = {given} but the expression gives {derived}"
    )))
}

/// Builds `g(x)` from an expression, explicit coefficients, or both.
pub fn slow_function(
    name: &str,
    f: &FunctionInput,
    order: usize,
) -> Result<dacx_solvers::SlowFunction, CliError> {
    use dacx_solvers::SlowFunction;
    let given = match &f.taylor {
        Some(TaylorInput::Flat(v)) => Some(
            v.iter()
                .map(Coeff::to_rational)
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(TaylorInput::Box3(_)) => {
            return Err(CliError::Schema(format!(
                "{name}: expected a flat Taylor array"
            )))
        }
        None => None,
    };
    let Some(src) = &f.expr else {
        let coeffs = given.unwrap_or_default();
        return Ok(SlowFunction::polynomial(coeffs));
    };
    let e = parse_in(name, src, &[Var::X])?;
    let label = e.to_string();
    let derived = match e.poly_degree() {
        Some(d) => e.taylor::<Rational>(d[0] + 1)?,
        None => e.taylor::<Rational>(order)?,
    };
    if let Some(g) = &given {
        for (k, (a, b)) in g.iter().zip(&derived).enumerate() {
            cross_check(name, format!("[{k}]"), a, b)?;
        }
        if e.poly_degree().is_some() {
            if let Some((k, a)) = g
                .iter()
                .enumerate()
                .skip(derived.len())
                .find(|(_, a)| !a.is_zero())
            {
                cross_check(name, format!("[{k}]"), a, &Rational::zero())?;
            }
        }
    }
    let mut g = if e.poly_degree().is_some() {
        SlowFunction::polynomial(derived)
    } else {
        let ev = e.clone();
        SlowFunction::new(
            label.clone(),
            derived,
            Arc::new(move |x| ev.eval(x, 0.0, 0.0)),
        )
    };
    g.label = label;
    Ok(g)
}

/// Builds `P(x, y, ε)`; polynomial expressions carry their exact box.
pub fn trivariate(
    name: &str,
    f: &FunctionInput,
    dims: [usize; 3],
    vars: &[Var],
) -> Result<dacx_solvers::TrivariateFunction, CliError> {
    use dacx_solvers::TrivariateFunction;
    let given = match &f.taylor {
        Some(TaylorInput::Box3(v)) => Some(
            v.iter()
                .map(|a| {
                    a.iter()
                        .map(|b| {
                            b.iter()
                                .map(Coeff::to_rational)
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(TaylorInput::Flat(_)) => {
            return Err(CliError::Schema(format!(
                "{name}: expected a Taylor box P[i][j][k]"
            )))
        }
        None => None,
    };
    let Some(src) = &f.expr else {
        let coeffs = given.unwrap_or_default();
        let c = coeffs.clone();
        let eval = Arc::new(move |x: f64, y: f64, e: f64| {
            let mut acc = 0.0;
            for (i, a) in c.iter().enumerate() {
                for (j, b) in a.iter().enumerate() {
                    for (k, v) in b.iter().enumerate() {
                        acc += Scalar::to_f64(v)
                            * x.powi(i as i32)
                            * y.powi(j as i32)
                            * e.powi(k as i32);
                    }
                }
            }
            acc
        });
        return Ok(TrivariateFunction::new(name, coeffs, true, eval)?);
    };
    let e = parse_in(name, src, vars)?;
    let (box_dims, polynomial) = match e.poly_degree() {
        Some(d) => ([d[0] + 1, d[1] + 1, d[2] + 1], true),
        None => (dims, false),
    };
    let derived = e.jet::<Rational>(box_dims)?;
    if let Some(g) = &given {
        for (i, a) in g.iter().enumerate() {
            for (j, b) in a.iter().enumerate() {
                for (k, v) in b.iter().enumerate() {
                    let in_box = i < box_dims[0] && j < box_dims[1] && k < box_dims[2];
                    if in_box || polynomial {
                        cross_check(name, format!("[{i}][{j}][{k}]"), v, &derived.get([i, j, k]))?;
                    }
                }
            }
        }
    }
    let ev = e.clone();
    let eval = Arc::new(move |x: f64, y: f64, eps: f64| ev.eval(x, y, eps));
    Ok(TrivariateFunction::new(
        e.to_string(),
        derived.nested(),
        polynomial,
        eval,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine() -> &'static str {
        r#"{"schema_version": 1, "kind": "linear-model", "p": 2,
            "functions": {"g": {"expr": "x + 1", "taylor": [1, "1"]}},
            "orders": {"N": 3, "M": 6}}"#
    }

    #[test]
    fn accepts_a_minimal_file() {
        let pf = ProblemFile::from_json(affine()).unwrap();
        let spec = pf.equation().unwrap();
        assert_eq!(spec.p(), 2);
        assert_eq!(pf.grid(), GridSpec::default());
    }

    #[test]
    fn rejects_unknown_keys_everywhere() {
        let bad = affine().replace("\"orders\"", "\"colour\": 1, \"orders\"");
        assert!(matches!(
            ProblemFile::from_json(&bad),
            Err(CliError::Schema(_))
        ));
        let bad = affine().replace("\"M\": 6", "\"M\": 6, \"K\": 2");
        assert!(matches!(
            ProblemFile::from_json(&bad),
            Err(CliError::Schema(_))
        ));
        let bad = affine().replace("\"expr\"", "\"expression\"");
        assert!(matches!(
            ProblemFile::from_json(&bad),
            Err(CliError::Schema(_))
        ));
        let bad = affine().replace("\"g\"", "\"h\"");
        assert!(matches!(
            ProblemFile::from_json(&bad),
            Err(CliError::Schema(_))
        ));
    }

    #[test]
    fn rejects_other_schema_versions() {
        let bad = affine().replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(ProblemFile::from_json(&bad)
            .unwrap_err()
            .to_string()
            .contains("schema_version"));
    }

    #[test]
    fn cross_checks_expression_against_taylor() {
        let bad = affine().replace("[1, \"1\"]", "[1, \"1/2\"]");
        let pf = ProblemFile::from_json(&bad).unwrap();
        let err = pf.equation().unwrap_err();
        assert!(err.to_string().contains("taylor[1]"), "{err}");
        let extra = affine().replace("[1, \"1\"]", "[1, 1, 0, 3]");
        assert!(ProblemFile::from_json(&extra).unwrap().equation().is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let bad = affine().replace("x + 1", "x + * 1");
        let err = ProblemFile::from_json(&bad)
            .unwrap()
            .equation()
            .unwrap_err();
        assert!(matches!(err, CliError::Syntax { .. }));
        assert!(err.to_string().contains("1:5"), "{err}");
    }

    #[test]
    fn log_at_zero_is_a_domain_error() {
        let bad = affine().replace(
            "\"expr\": \"x + 1\", \"taylor\": [1, \"1\"]",
            "\"expr\": \"log(x)\"",
        );
        let err = ProblemFile::from_json(&bad)
            .unwrap()
            .equation()
            .unwrap_err();
        assert!(matches!(err, CliError::Domain(_)), "{err}");
    }

    #[test]
    fn quasilinear_polynomial_box_is_exact() {
        let src = r#"{"schema_version": 1, "kind": "quasilinear", "p": 2,
            "functions": {"P": {"expr": "1 + x*y - eps*y^2"}}, "orders": {"N": 2, "M": 4}}"#;
        let spec = ProblemFile::from_json(src).unwrap().equation().unwrap();
        let dacx_solvers::EquationSpec::QuasiLinear { pfun, .. } = spec else {
            panic!()
        };
        assert!(pfun.polynomial);
        assert_eq!(pfun.orders(), (2, 3, 2));
        assert_eq!(
            pfun.coeff::<Rational>(0, 2, 1),
            Some(Rational::from_i64(-1))
        );
    }

    #[test]
    fn parameters_and_fixed_orders() {
        let src = r#"{"schema_version": 1, "kind": "resonance-pair", "p": 4, "params": {"alpha": 1, "beta": "4"}}"#;
        assert!(ProblemFile::from_json(src).unwrap().equation().is_ok());
        let src =
            r#"{"schema_version": 1, "kind": "union-jack-inner", "p": 2, "params": {"c": 0.3}}"#;
        assert!(ProblemFile::from_json(src).is_err());
    }
}
