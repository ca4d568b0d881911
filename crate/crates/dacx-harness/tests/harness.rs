use std::path::PathBuf;
use std::sync::Arc;

use dacx_fastfn::Ray;
use dacx_harness::report::read_json;
use dacx_harness::{
    divergence_signature, emit_report, error_sweep, read_csv, GridSpec, ReportFormat, ReportRow,
    SweepOptions, ValidationReport, Verdict,
};
use dacx_num::{Rational, Scalar};
use dacx_solvers::{dac_linear_model, EquationSpec, SlowFunction};
use proptest::prelude::*;

fn exp_forcing(order: usize) -> SlowFunction {
    let mut fact = Rational::from_i64(1);
    let mut taylor = Vec::new();
    for k in 0..order {
        if k > 0 {
            fact = fact * Rational::from_i64(k as i64);
        }
        taylor.push(Rational::from_i64(1) / fact.clone());
    }
    SlowFunction::new("exp(x)", taylor, Arc::new(f64::exp))
}

fn lorentzian(order: usize) -> SlowFunction {
    let taylor = (0..order)
        .map(|k| Rational::from_i64([1, 0, -1, 0][k % 4]))
        .collect();
    SlowFunction::new("1/(1+x^2)", taylor, Arc::new(|x: f64| 1.0 / (1.0 + x * x)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dacx-harness-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn affine_forcing_is_reproduced_exactly_by_two_levels() {
    let g = SlowFunction::polynomial(vec![Rational::from_i64(1), Rational::from_i64(1)]);
    let spec = EquationSpec::LinearModel { p: 2, g };
    let dac = dac_linear_model::<Rational>(&spec, Ray::Minus, 3, 4)
        .unwrap()
        .convert::<f64>();
    let grid = GridSpec::with_etas(vec![1.0, 0.5, 0.2]);
    let rep = error_sweep(&spec, &dac, &grid, &[3], &SweepOptions::default()).unwrap();
    assert!(
        rep.rows.iter().all(|r| r.sup_error <= 1e-9),
        "{:?}",
        rep.rows
    );
    assert!(rep.fits[0].exact);
}

#[test]
fn exp_forcing_errors_scale_with_the_truncation_order() {
    let spec = EquationSpec::LinearModel {
        p: 2,
        g: exp_forcing(80),
    };
    let dac = dac_linear_model::<Rational>(&spec, Ray::Minus, 5, 40)
        .unwrap()
        .convert::<f64>();
    let rep = error_sweep(
        &spec,
        &dac,
        &GridSpec::default(),
        &[2, 3, 4],
        &SweepOptions::default(),
    )
    .unwrap();
    for f in &rep.fits {
        assert_eq!(f.verdict, Verdict::Pass, "{}", f.reason);
    }
    assert!(rep.all_pass());
}

#[test]
fn errors_do_not_grow_with_n_below_optimal_truncation() {
    let spec = EquationSpec::LinearModel {
        p: 2,
        g: exp_forcing(80),
    };
    let dac = dac_linear_model::<Rational>(&spec, Ray::Minus, 6, 40)
        .unwrap()
        .convert::<f64>();
    let grid = GridSpec::default();
    let ns: Vec<usize> = (1..=6).collect();
    let rep = error_sweep(&spec, &dac, &grid, &ns, &SweepOptions::default()).unwrap();
    for &eta in &grid.etas {
        let errs: Vec<f64> = rep
            .rows
            .iter()
            .filter(|r| r.eta == eta)
            .map(|r| r.sup_error)
            .collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0]), "η = {eta}: {errs:?}");
    }
}

#[test]
fn lorentzian_forcing_shows_the_divergence_signature() {
    let spec = EquationSpec::LinearModel {
        p: 2,
        g: lorentzian(200),
    };
    let dac = dac_linear_model::<Rational>(&spec, Ray::Minus, 32, 120)
        .unwrap()
        .convert::<f64>();
    let xs: Vec<f64> = (0..11).map(|i| -0.05 * i as f64).collect();
    let d = divergence_signature(&spec, &dac, 0.4, &xs, 0.5, &SweepOptions::default()).unwrap();
    assert!(d.verdict, "{:?}", d.errors);
    assert!(d.errors[32] > 2.0 * d.errors[d.best_n]);
    assert!(
        d.best_n.abs_diff(d.predicted.n_star) <= 4,
        "best {} predicted {}",
        d.best_n,
        d.predicted.n_star
    );
    assert!(
        (1.0 / d.estimate.p - 0.5).abs() <= 0.1,
        "fitted p = {}",
        d.estimate.p
    );
}

#[test]
fn csv_and_json_reports_carry_the_same_values() {
    let spec = EquationSpec::LinearModel {
        p: 2,
        g: exp_forcing(80),
    };
    let dac = dac_linear_model::<Rational>(&spec, Ray::Minus, 3, 40)
        .unwrap()
        .convert::<f64>();
    let rep = error_sweep(
        &spec,
        &dac,
        &GridSpec::default(),
        &[1, 2],
        &SweepOptions::default(),
    )
    .unwrap();
    let (csv, json) = (scratch("sweep.csv"), scratch("sweep.json"));
    emit_report(&rep, &csv, ReportFormat::Csv).unwrap();
    emit_report(&rep, &json, ReportFormat::Json).unwrap();
    let a = read_csv(&csv).unwrap();
    assert_eq!(a, rep.rows);
    assert_eq!(read_json(&json).unwrap(), a);
}

#[test]
fn empty_report_is_header_only() {
    let path = scratch("empty.csv");
    emit_report(&ValidationReport::default(), &path, ReportFormat::Csv).unwrap();
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "eta,N,sup_error,fit_slope,fit_stderr,wall_ms\n"
    );
    assert!(read_csv(&path).unwrap().is_empty());
}

#[test]
fn unwritable_path_is_an_io_error() {
    let path = scratch("missing-dir").join("nested").join("r.csv");
    let err = emit_report(&ValidationReport::default(), &path, ReportFormat::Csv).unwrap_err();
    assert!(err.to_string().contains("r.csv"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e300f64..1e300, -1.0f64..1.0, 1e-300f64..1e-200]
}

proptest! {
    #[test]
    fn one_row_report_round_trips(eta in finite(), n in 0usize..50, e in finite(), s in proptest::option::of(finite()), w in finite()) {
        let row = ReportRow { eta, n, sup_error: e, fit_slope: s, fit_stderr: s.map(f64::abs), wall_ms: w };
        let rep = ValidationReport { spec: "row".into(), rows: vec![row], fits: vec![] };
        let (csv, json) = (scratch("row.csv"), scratch("row.json"));
        emit_report(&rep, &csv, ReportFormat::Csv).unwrap();
        emit_report(&rep, &json, ReportFormat::Json).unwrap();
        prop_assert_eq!(&read_csv(&csv).unwrap(), &rep.rows);
        prop_assert_eq!(&read_json(&json).unwrap(), &rep.rows);
    }
}
