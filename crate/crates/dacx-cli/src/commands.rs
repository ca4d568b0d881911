//! Subcommand implementations. Each returns a human summary and a verdict;
//! data goes to files (or stdout when no path is given).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dacx_core::CombinedSeries;
use dacx_gevrey::{borel_laplace, gevrey_fit, optimal_truncate, BorelSumConfig};
use dacx_harness::{emit_report, error_sweep, level_norms, ReportFormat, Verdict};
use dacx_num::{Rational, Scalar};
use dacx_solvers::{
    canard_alpha, canard_moments, canard_value_shoot, dac_initial_layer, dac_linear_model,
    quasilinear_dac, resonance_check, EquationSpec, ResonanceVerdict, ShootOptions,
};
use serde_json::Value;

use crate::dump::{expansion_from_json_f64, expansion_to_json, TextScalar};
use crate::error::CliError;
use crate::problem::{FormatName, Kind, ProblemFile};

/// Result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    /// `false` when a verdict failed.
    pub pass: bool,
}

impl Outcome {
    fn ok(summary: String) -> Self {
        Self {
            summary,
            pass: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalarMode {
    #[default]
    Rational,
    Float,
}

/// Combined expansion of the problem, `orders.N` levels of order `orders.M`.
pub fn build_expansion<S: Scalar>(
    pf: &ProblemFile,
    spec: &EquationSpec,
) -> Result<CombinedSeries<S>, CliError> {
    let (n, m) = (pf.orders.n, pf.orders.m);
    Ok(match (pf.kind, spec) {
        (Kind::LinearModel, _) => dac_linear_model::<S>(spec, pf.ray(), n, m)?,
        (Kind::Quasilinear, _) => quasilinear_dac::<S>(spec, pf.ray(), n, m)?,
        (
            Kind::LinearRepulsiveAttractive,
            EquationSpec::LinearRepulsiveAttractive { g, c_series },
        ) => {
            let mut c: Vec<S> = c_series.iter().map(dacx_num::scalar::convert).collect();
            c.resize(c.len().max(n), S::zero());
            dac_initial_layer::<S>(g, &c, n, m)?
        }
        (Kind::ControlledLinear, _) => {
            let p = pf.p() as usize;
            let cs = canard_alpha::<S>(spec, n.div_ceil(p), m)?;
            let levels: Vec<Vec<S>> = (0..n)
                .map(|l| {
                    if l % p == 0 {
                        cs.y_coeffs[l / p].coeffs.clone()
                    } else {
                        vec![S::zero(); m]
                    }
                })
                .collect();
            CombinedSeries::from_slow(pf.p(), levels, m)
        }
        (kind, _) => {
            return Err(CliError::Usage(format!(
                "kind {kind:?} has no combined expansion"
            )))
        }
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<Option<String>, CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::io(p.display(), e))?;
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}

fn output_path(pf: Option<&ProblemFile>, flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| pf.and_then(|p| p.output.as_ref()?.path.as_ref().map(PathBuf::from)))
}

fn dump<S: TextScalar>(pf: &ProblemFile, spec: &EquationSpec) -> Result<(Value, usize), CliError> {
    let y = build_expansion::<S>(pf, spec)?;
    Ok((expansion_to_json(&y, spec.name()), y.eta_order()))
}

/// `expand`: builds the expansion and writes its lossless JSON form.
pub fn expand(
    pf: &ProblemFile,
    mode: ScalarMode,
    output: Option<&Path>,
) -> Result<Outcome, CliError> {
    let spec = pf.equation()?;
    let (doc, levels) = match mode {
        ScalarMode::Rational => dump::<Rational>(pf, &spec)?,
        ScalarMode::Float => dump::<f64>(pf, &spec)?,
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Numeric(e.to_string()))?;
    let path = output_path(Some(pf), output);
    let mut summary = format!(
        "expanded {} (p = {}): {levels} levels, order {}",
        spec.name(),
        pf.p(),
        pf.orders.m
    );
    match write_out(path.as_deref(), &text)? {
        Some(t) => summary = format!("{t}\n{summary}"),
        None => write!(summary, "; wrote {}", path.unwrap_or_default().display()).unwrap(),
    }
    if pf.kind == Kind::ControlledLinear {
        let cs =
            canard_alpha::<Rational>(&spec, pf.orders.n.div_ceil(pf.p() as usize), pf.orders.m)?;
        let alpha: Vec<String> = cs.alpha_coeffs.iter().map(TextScalar::encode).collect();
        write!(summary, "\nα coefficients (ε^0..): [{}]", alpha.join(", ")).unwrap();
    }
    Ok(Outcome::ok(summary))
}

/// Where `eval` gets its expansion from.
pub enum EvalSource<'a> {
    Problem(&'a ProblemFile),
    Expansion(&'a Path),
}

/// `eval`: partial sums on the grid points (or on `xs`) for every `η`.
///
/// Columns: `eta, x, N, value`, with 17 significant digits.
pub fn eval(
    source: EvalSource<'_>,
    problem_for_grid: Option<&ProblemFile>,
    etas: Option<&[f64]>,
    xs: Option<&[f64]>,
    n: Option<usize>,
    output: Option<&Path>,
) -> Result<Outcome, CliError> {
    let y: CombinedSeries<f64> = match source {
        EvalSource::Problem(pf) => build_expansion::<Rational>(pf, &pf.equation()?)?.convert(),
        EvalSource::Expansion(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
            expansion_from_json_f64(&v)?
        }
    };
    let grid = problem_for_grid.map(ProblemFile::grid).unwrap_or_default();
    let etas: Vec<f64> = etas
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| grid.etas.clone());
    if etas.iter().any(|e| !(*e > 0.0)) {
        return Err(CliError::Usage(format!(
            "η values must be positive: {etas:?}"
        )));
    }
    let levels = n.unwrap_or(y.eta_order());
    if levels > y.eta_order() {
        return Err(CliError::Usage(format!(
            "N = {levels} exceeds the {} levels of the expansion",
            y.eta_order()
        )));
    }
    let quad = problem_for_grid
        .map(|p| p.sweep_options().quad)
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["eta", "x", "N", "value"])
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut count = 0;
    for &eta in &etas {
        let points = xs.map(<[f64]>::to_vec).unwrap_or_else(|| grid.points(eta));
        for x in points {
            let v = y.partial_sum(x, eta, levels, &quad)?;
            w.write_record([
                format!("{eta:.16e}"),
                format!("{x:.16e}"),
                levels.to_string(),
                format!("{v:.16e}"),
            ])
            .map_err(|e| CliError::Numeric(e.to_string()))?;
            count += 1;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is UTF-8");
    let path = output_path(problem_for_grid, output);
    let mut summary = format!("evaluated {count} partial sums with N = {levels}");
    match write_out(path.as_deref(), &text)? {
        Some(t) => summary = format!("{}{summary}", t),
        None => write!(summary, "; wrote {}", path.unwrap_or_default().display()).unwrap(),
    }
    Ok(Outcome::ok(summary))
}

fn report_format(pf: &ProblemFile, flag: Option<FormatName>, path: &Path) -> ReportFormat {
    match flag.or_else(|| pf.output.as_ref().and_then(|o| o.format)) {
        Some(FormatName::Csv) => ReportFormat::Csv,
        Some(FormatName::Json) => ReportFormat::Json,
        None => ReportFormat::from_path(path).unwrap_or(ReportFormat::Csv),
    }
}

/// `validate`: error sweep against the reference solution; fails unless every
/// truncation in `n_list` (default: all `orders.N` levels) passes its order check.
pub fn validate(
    pf: &ProblemFile,
    n_list: Option<&[usize]>,
    output: Option<&Path>,
    format: Option<FormatName>,
) -> Result<Outcome, CliError> {
    let spec = pf.equation()?;
    let y: CombinedSeries<f64> = build_expansion::<Rational>(pf, &spec)?.convert();
    let ns = n_list
        .map(<[usize]>::to_vec)
        .unwrap_or_else(|| vec![pf.orders.n]);
    let report = error_sweep(&spec, &y, &pf.grid(), &ns, &pf.sweep_options())?;
    let mut summary = String::new();
    for f in &report.fits {
        let tag = if f.verdict == Verdict::Pass {
            "PASS"
        } else {
            "FAIL"
        };
        writeln!(summary, "N = {}: {tag} ({})", f.n, f.reason).unwrap();
    }
    if let Some(path) = output_path(Some(pf), output) {
        emit_report(&report, &path, report_format(pf, format, &path))?;
        writeln!(summary, "wrote {}", path.display()).unwrap();
    }
    let pass = report.all_pass();
    write!(
        summary,
        "{}",
        if pass {
            "all verdicts pass"
        } else {
            "some verdicts failed"
        }
    )
    .unwrap();
    Ok(Outcome { summary, pass })
}

/// `canard-value`: bisection for the canard value of `Y' = Y(Y − X)(Y + X) + c`.
pub fn canard_value(tol: f64, x_far: f64) -> Result<(f64, Outcome), CliError> {
    let opts = ShootOptions {
        tol,
        x_far,
        ..ShootOptions::default()
    };
    let r = canard_value_shoot(&EquationSpec::UnionJackInner { c: 0.0 }, &opts)?;
    let (lo, hi) = r.brackets.last().copied().unwrap_or((r.c_value, r.c_value));
    let summary = format!(
        "{:.12}\nbisection: {} trials, final bracket [{lo:.12}, {hi:.12}], X_far = {x_far}",
        r.c_value,
        r.trials.len()
    );
    Ok((r.c_value, Outcome::ok(summary)))
}

/// `canard-moments`: the moments `I_0..I_{N−1}`.
pub fn moments(pf: &ProblemFile) -> Result<Outcome, CliError> {
    let spec = pf.equation()?;
    let quad = pf.sweep_options().quad;
    let m = canard_moments(&spec, pf.orders.n, &quad)?;
    let mut s = String::new();
    for (k, v) in m.iter().enumerate() {
        writeln!(s, "I_{k} = {v:.16e}").unwrap();
    }
    Ok(Outcome::ok(s.trim_end().to_string()))
}

/// `resonance`: polynomial-solution check for `Z'' − αX^{p−1}Z' + βX^{p−2}Z = 0`.
pub fn resonance(spec: &EquationSpec) -> Result<Outcome, CliError> {
    let r = resonance_check(spec)?;
    let summary = match r.verdict {
        ResonanceVerdict::Resonant => {
            let z = r.z0.unwrap_or_default();
            let coeffs: Vec<String> = z.iter().map(|c| c.to_string()).collect();
            format!(
                "resonant, D={}, Z0 degree {}\nZ0 coefficients (X^0..): [{}]",
                r.d,
                z.len().saturating_sub(1),
                coeffs.join(", ")
            )
        }
        ResonanceVerdict::NonResonant => match r.witness {
            Some(m0) => format!("non-resonant, D={}, witness m0={m0}\n{}", r.d, r.reason),
            None => format!("non-resonant, D={}\n{}", r.d, r.reason),
        },
    };
    Ok(Outcome::ok(summary))
}

pub fn resonance_spec(alpha: &str, beta: &str, p: u32) -> Result<EquationSpec, CliError> {
    let q = |s: &str| crate::problem::Coeff::Text(s.to_string()).to_rational();
    Ok(EquationSpec::ResonancePair {
        alpha: q(alpha)?,
        beta: q(beta)?,
        p,
    })
}

/// `gevrey-fit`: fit of `C L^n Γ(n/p + 1)` to the norms, with the optimal
/// truncation at `eta` when given.
pub fn gevrey(norms: &[f64], p_hint: Option<f64>, eta: Option<f64>) -> Result<Outcome, CliError> {
    let est = gevrey_fit(norms, p_hint)?;
    let mut s = format!(
        "p = {:.6}, Gevrey order 1/p = {:.6}\nC = {:.6e}, L1 = {:.6e}, residual = {:.3e}",
        est.p,
        est.order(),
        est.c,
        est.l1,
        est.residual
    );
    if let Some(eta) = eta {
        let t = optimal_truncate(&est, eta, norms.len());
        write!(
            s,
            "\nη = {eta}: N* = {}, remainder bound {:.3e}, A = {:.6}",
            t.n_star, t.remainder_bound, t.exponent
        )
        .unwrap();
    }
    Ok(Outcome::ok(s))
}

/// Level norms of the problem's expansion at radius `r`.
pub fn problem_norms(pf: &ProblemFile, r: f64) -> Result<Vec<f64>, CliError> {
    let y = build_expansion::<Rational>(pf, &pf.equation()?)?;
    Ok(level_norms(&y, r))
}

/// `borel-sum`: truncated Borel–Laplace sum of `Σ a_n η^n`.
pub fn borel(coeffs: &[f64], eta: f64, p: u32, rho: f64) -> Result<(f64, Outcome), CliError> {
    let v = borel_laplace(coeffs, eta, &BorelSumConfig::new(p, rho))?;
    Ok((
        v,
        Outcome::ok(format!(
            "{v:.16e}\n{} coefficients, p = {p}, ρ = {rho}, η = {eta}",
            coeffs.len()
        )),
    ))
}
