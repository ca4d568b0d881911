//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dacx_cli::laws::check_laws;
use dacx_fastfn::{u_eval, u_tail, QuadConfig, Ray};
use dacx_gevrey::{borel_laplace, gevrey_fit, BorelSumConfig};
use dacx_harness::{
    divergence_signature, error_sweep, level_norms, reference_on_grid, GridSpec, ReferenceOptions,
    SweepOptions,
};
use dacx_num::quad::{integrate, QuadOptions};
use dacx_num::special::ln_gamma;
use dacx_num::{Rational, Scalar};
use dacx_solvers::{
    canard_alpha_numeric, dac_linear_model, resonance_check, EquationSpec, ResonanceVerdict,
    SlowFunction,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Duration, limit: f64) -> Result<(), String> {
    ensure(t.as_secs_f64() < limit, || {
        format!("took {:.2} s, limit {limit} s", t.as_secs_f64())
    })
}

fn affine() -> SlowFunction {
    SlowFunction::polynomial(vec![q(1, 1), q(1, 1)])
}

fn exp_forcing(order: usize) -> SlowFunction {
    let taylor = (0..order).map(|k| q(1, 1) / factorial(k)).collect();
    SlowFunction::new("exp(x)", taylor, Arc::new(f64::exp))
}

fn factorial(k: usize) -> Rational {
    (1..=k as i64).fold(q(1, 1), |a, i| a * q(i, 1))
}

fn lorentzian(order: usize) -> SlowFunction {
    let taylor = (0..order).map(|k| q([1, 0, -1, 0][k % 4], 1)).collect();
    SlowFunction::new("1/(1+x^2)", taylor, Arc::new(|x: f64| 1.0 / (1.0 + x * x)))
}

fn canard_value() -> Outcome {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dacx"))
        .args(["canard-value", "--tol", "1e-8"])
        .output()
        .map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    ensure(out.status.success(), || {
        format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    let text = String::from_utf8_lossy(&out.stdout);
    let c: f64 = text
        .lines()
        .next()
        .unwrap_or_default()
        .trim()
        .parse()
        .map_err(|e| format!("{e}: {text}"))?;
    ensure((c - 0.3621759411).abs() <= 1e-6, || format!("c_0 = {c}"))?;
    within(dt, 10.0)?;
    Ok(format!("c_0 = {c:.10}, {:.2} s", dt.as_secs_f64()))
}

fn tail_coefficients() -> Outcome {
    let t = u_tail::<Rational>(2, 1, Ray::Minus, 5);
    let want = vec![q(-1, 2), q(0, 1), q(1, 4), q(0, 1), q(-3, 8)];
    ensure(t.coeffs == want, || format!("{:?}", t.coeffs))?;
    Ok("[-1/2, 0, 1/4, 0, -3/8]".into())
}

fn closed_form() -> Outcome {
    let t = Instant::now();
    let spec = EquationSpec::LinearModel { p: 2, g: affine() };
    let grid = GridSpec::with_etas(vec![1.0, 0.5, 0.2]);
    let cfg = QuadConfig::default();
    let mut worst = 0f64;
    for &eta in &grid.etas {
        let eps = eta * eta;
        let xs = grid.points(eta);
        let r = reference_on_grid(&spec, eps, &xs, &ReferenceOptions::default())
            .map_err(|e| e.to_string())?;
        for (x, r) in xs.iter().zip(r) {
            let exact = eta * u_eval(2, 1, Ray::Minus, x / eta, &cfg).map_err(|e| e.to_string())?
                - eps / 2.0;
            worst = worst.max((r - exact).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("sup error {worst:e}"))?;
    within(t.elapsed(), 5.0)?;
    Ok(format!(
        "sup error {worst:.2e}, {:.2} s",
        t.elapsed().as_secs_f64()
    ))
}

fn convergence_order() -> Outcome {
    let t = Instant::now();
    let spec = EquationSpec::LinearModel {
        p: 2,
        g: exp_forcing(80),
    };
    let dac = dac_linear_model::<Rational>(&spec, Ray::Minus, 5, 40)
        .map_err(|e| e.to_string())?
        .convert::<f64>();
    let grid = GridSpec::with_etas(vec![0.2, 0.1, 0.05, 0.025]);
    let rep = error_sweep(&spec, &dac, &grid, &[2, 3, 4], &SweepOptions::default())
        .map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for f in &rep.fits {
        let slope = f
            .slope
            .ok_or_else(|| format!("N = {}: no slope ({})", f.n, f.reason))?;
        ensure((slope - f.n as f64).abs() <= 0.3, || {
            format!("N = {}: slope {slope:.3}", f.n)
        })?;
        parts.push(format!("N={} slope {slope:.3}", f.n));
    }
    within(t.elapsed(), 30.0)?;
    Ok(format!(
        "{}, {:.2} s",
        parts.join(", "),
        t.elapsed().as_secs_f64()
    ))
}

fn control_parameter() -> Outcome {
    let cfg = QuadConfig::default();
    let spec = EquationSpec::ControlledLinear { p: 2, g: affine() };
    let eps = [0.1, 0.05, 0.025];
    let a: Vec<f64> = eps
        .iter()
        .map(|&e| canard_alpha_numeric(&spec, e, &cfg))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    // two Richardson steps for a power series in ε with halving steps
    let r1 = [2.0 * a[1] - a[0], 2.0 * a[2] - a[1]];
    let alpha0 = (4.0 * r1[1] - r1[0]) / 3.0;
    ensure((alpha0 + 1.0).abs() <= 1e-3, || {
        format!("extrapolated α_0 = {alpha0}")
    })?;
    let odd = SlowFunction::new(
        "x^3 - 2 sin(x)",
        vec![q(0, 1), q(-2, 1), q(0, 1), q(4, 3)],
        Arc::new(|x: f64| x.powi(3) - 2.0 * x.sin()),
    );
    let odd = EquationSpec::ControlledLinear { p: 2, g: odd };
    let mut worst = 0f64;
    for e in [0.5, 0.1, 0.02] {
        worst = worst.max(
            canard_alpha_numeric(&odd, e, &cfg)
                .map_err(|e| e.to_string())?
                .abs(),
        );
    }
    ensure(worst <= 1e-12, || {
        format!("odd forcing gives |α| = {worst:e}")
    })?;
    Ok(format!("α_0 ≈ {alpha0:.8}, odd |α| ≤ {worst:.1e}"))
}

fn resonance_triple() -> Outcome {
    let check = |b: i64| {
        resonance_check(&EquationSpec::ResonancePair {
            alpha: q(1, 1),
            beta: q(b, 1),
            p: 4,
        })
    };
    let r4 = check(4).map_err(|e| e.to_string())?;
    let z = r4.z0.clone().unwrap_or_default();
    ensure(
        r4.verdict == ResonanceVerdict::Resonant && z.len() == 5 && z[4] != q(0, 1),
        || format!("(1,4,4): {r4:?}"),
    )?;
    let r5 = check(5).map_err(|e| e.to_string())?;
    ensure(r5.verdict == ResonanceVerdict::Resonant, || {
        format!("(1,5,4): {r5:?}")
    })?;
    let r3 = check(3).map_err(|e| e.to_string())?;
    ensure(
        r3.verdict == ResonanceVerdict::NonResonant && r3.witness.is_some(),
        || format!("(1,3,4): {r3:?}"),
    )?;
    Ok(format!(
        "(1,4,4) Z0 degree 4, (1,5,4) resonant, (1,3,4) witness m0 = {}",
        r3.witness.unwrap()
    ))
}

fn synthetic(c: f64, l: f64, p: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| c * l.powi(k as i32) * ln_gamma(k as f64 / p + 1.0).exp())
        .collect()
}

fn gevrey_fits() -> Outcome {
    for (c, l, p) in [(1.0, 1.0, 2.0), (3.0, 2.0, 3.0)] {
        let e = gevrey_fit(&synthetic(c, l, p, 41), None).map_err(|e| e.to_string())?;
        let rel = [
            (e.c / c - 1.0).abs(),
            (e.l1 / l - 1.0).abs(),
            (e.p / p - 1.0).abs(),
        ];
        ensure(rel.iter().all(|&r| r <= 0.01), || {
            format!("({c},{l},{p}) fitted as {e:?}")
        })?;
    }
    let spec = EquationSpec::LinearModel {
        p: 2,
        g: lorentzian(200),
    };
    let dac =
        dac_linear_model::<Rational>(&spec, Ray::Minus, 32, 120).map_err(|e| e.to_string())?;
    let e = gevrey_fit(&level_norms(&dac, 0.5), None).map_err(|e| e.to_string())?;
    let order = e.order();
    ensure((order / 0.5 - 1.0).abs() <= 0.2, || {
        format!("DAC Gevrey order {order}")
    })?;
    Ok(format!("synthetic within 1%, DAC 1/p = {order:.3}"))
}

fn borel_laplace_euler() -> Outcome {
    let eta = 0.1;
    let a: Vec<f64> = (0..150)
        .map(|n| (-1f64).powi(n) * ln_gamma(n as f64 + 1.0).exp())
        .collect();
    let v = borel_laplace(&a, eta, &BorelSumConfig::new(1, 0.95)).map_err(|e| e.to_string())?;
    // ∫_0^∞ e^{−t/η}/(1 + t) dt/η, the Laplace transform of the summed Borel series
    let oracle = integrate(
        |t| (-t / eta).exp() / (1.0 + t) / eta,
        0.0,
        60.0 * eta,
        &QuadOptions::default(),
    )
    .map_err(|e| e.to_string())?
    .value;
    ensure((v - oracle).abs() < 1e-4, || format!("{v} vs {oracle}"))?;
    Ok(format!("{v:.10} vs oracle {oracle:.10}"))
}

fn algebra_laws() -> Outcome {
    let results = check_laws(20261015, 1000);
    let failed: Vec<String> = results
        .iter()
        .filter_map(|r| r.failure.as_ref().map(|f| format!("{}: {f}", r.name)))
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!("{} laws × 1000 cases", results.len()))
}

fn divergence() -> Outcome {
    let spec = EquationSpec::LinearModel {
        p: 2,
        g: lorentzian(200),
    };
    let dac = dac_linear_model::<Rational>(&spec, Ray::Minus, 32, 120)
        .map_err(|e| e.to_string())?
        .convert::<f64>();
    let xs: Vec<f64> = (0..11).map(|i| -0.05 * i as f64).collect();
    let d = divergence_signature(&spec, &dac, 0.4, &xs, 0.5, &SweepOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(d.verdict, || format!("no interior minimum: {:?}", d.errors))?;
    Ok(format!(
        "η = 0.4: minimum {:.2e} at N = {}, predicted N* = {}, error {:.2e} at N = 32",
        d.errors[d.best_n], d.best_n, d.predicted.n_star, d.errors[32]
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("canard value", canard_value),
        ("tail coefficients", tail_coefficients),
        ("closed-form exactness", closed_form),
        ("convergence order", convergence_order),
        ("control parameter", control_parameter),
        ("resonance triple", resonance_triple),
        ("Gevrey fit", gevrey_fits),
        ("Borel-Laplace", borel_laplace_euler),
        ("algebra laws", algebra_laws),
        ("divergence signature", divergence),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
