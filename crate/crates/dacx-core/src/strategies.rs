//! Random rational combined series for property tests.

use dacx_fastfn::FastTail;
use dacx_num::{Rational, Scalar};
use proptest::prelude::*;

use crate::series::{CombinedSeries, FastCoefficient, SlowSeries, Term};

/// Small rationals `n/d` with `|n| ≤ 3`, `1 ≤ d ≤ 3`; a third of draws are zero.
pub fn small_rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        1 => Just(Rational::from_i64(0)),
        2 => (-3i64..=3, 1i64..=3).prop_map(|(n, d)| Rational::ratio(n, d)),
    ]
}

fn term(order: usize, residue_free: bool) -> impl Strategy<Value = Term<Rational>> {
    (
        prop::collection::vec(small_rational(), order),
        prop::collection::vec(small_rational(), order),
    )
        .prop_map(move |(slow, mut tail)| {
            if residue_free {
                tail[0] = Rational::from_i64(0);
            }
            Term {
                slow: SlowSeries::new(slow),
                fast: FastCoefficient::from_tail(FastTail::new(tail)),
            }
        })
}

/// Series with `N` levels and common order `M`, `M ≥ N`.
pub fn series_with(
    levels: usize,
    order: usize,
    residue_free: bool,
) -> impl Strategy<Value = CombinedSeries<Rational>> {
    prop::collection::vec(term(order, residue_free), levels).prop_map(move |mut terms| {
        if let Some(t) = terms.first_mut() {
            // The level-0 fast part must vanish identically for differentiation.
            if residue_free {
                t.fast = FastCoefficient::zero(t.fast.order());
            }
        }
        CombinedSeries { p: 2, terms }
    })
}

/// Shape `(N, M)` with `N ∈ 1..=4`, `M ∈ N..=N+3`.
pub fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), n..=n + 3))
}

pub fn series() -> impl Strategy<Value = CombinedSeries<Rational>> {
    shape().prop_flat_map(|(n, m)| series_with(n, m, false))
}

/// Pairs and triples share one shape so that sums and products line up.
pub fn series_pair() -> impl Strategy<Value = (CombinedSeries<Rational>, CombinedSeries<Rational>)>
{
    shape().prop_flat_map(|(n, m)| (series_with(n, m, false), series_with(n, m, false)))
}

#[allow(clippy::type_complexity)]
pub fn series_triple() -> impl Strategy<
    Value = (
        CombinedSeries<Rational>,
        CombinedSeries<Rational>,
        CombinedSeries<Rational>,
    ),
> {
    shape().prop_flat_map(|(n, m)| {
        (
            series_with(n, m, false),
            series_with(n, m, false),
            series_with(n, m, false),
        )
    })
}

/// Series with `g_{n,1} = 0` at every level and `g_0 ≡ 0`.
pub fn residue_free_series() -> impl Strategy<Value = CombinedSeries<Rational>> {
    (2usize..=4)
        .prop_flat_map(|n| (Just(n), n + 1..=n + 3))
        .prop_flat_map(|(n, m)| series_with(n, m, true))
}

/// Algebra laws checked on random inputs. Each returns a description of the
/// first violation.
pub mod laws {
    use dacx_fastfn::Ray;
    use dacx_num::{Rational, Scalar};

    use crate::calculus::{differentiate, integrate};
    use crate::matching::{extract_inner, extract_outer, match_reconstruct, matching_defect};
    use crate::product::mul;
    use crate::series::{distance, valuation, CombinedSeries};

    type Series = CombinedSeries<Rational>;

    pub fn commutative(y: &Series, z: &Series) -> Result<(), String> {
        let (a, b) = (
            mul(y, z).map_err(|e| e.to_string())?,
            mul(z, y).map_err(|e| e.to_string())?,
        );
        if a == b {
            Ok(())
        } else {
            Err(format!("yz = {a:?}\nzy = {b:?}"))
        }
    }

    pub fn associative(y: &Series, z: &Series, w: &Series) -> Result<(), String> {
        let l = mul(&mul(y, z).map_err(|e| e.to_string())?, w).map_err(|e| e.to_string())?;
        let r = mul(y, &mul(z, w).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if l.agrees_with(&r, 0.0) {
            Ok(())
        } else {
            Err(format!("(yz)w = {l:?}\ny(zw) = {r:?}"))
        }
    }

    pub fn valuation_is_superadditive(y: &Series, z: &Series) -> Result<(), String> {
        let p = mul(y, z).map_err(|e| e.to_string())?;
        let bound = (valuation(y) + valuation(z)).min(p.eta_order());
        if valuation(&p) >= bound {
            Ok(())
        } else {
            Err(format!("val(yz) = {} < {bound}", valuation(&p)))
        }
    }

    pub fn matching_identity(y: &Series) -> Result<(), String> {
        match matching_defect(&extract_outer(y), &extract_inner(y)) {
            None => Ok(()),
            Some(((n, m), dev, _)) => Err(format!(
                "c_{{{n},{m}}} differs from z_{{{},{}}} by {dev}",
                n as i64 + m,
                -m
            )),
        }
    }

    pub fn round_trip(y: &Series) -> Result<(), String> {
        let r =
            match_reconstruct(&extract_outer(y), &extract_inner(y)).map_err(|e| e.to_string())?;
        let expected = y.truncate_levels(r.eta_order());
        if r == expected && r.eta_order() > 0 {
            Ok(())
        } else {
            Err(format!("reconstructed {r:?}"))
        }
    }

    pub fn differentiate_integrate(y: &Series) -> Result<(), String> {
        let i = integrate(y, &Rational::from_i64(0), Ray::Minus);
        if i.has_log() {
            return Err("residue-free input produced a log term".into());
        }
        let d = differentiate(&i.base).map_err(|e| e.to_string())?;
        if d.eta_order() + 1 == y.eta_order() && d.agrees_with(y, 0.0) {
            Ok(())
        } else {
            Err(format!("d/dx ∫ y = {d:?}"))
        }
    }

    pub fn ultrametric(a: &Series, b: &Series, c: &Series) -> Result<(), String> {
        let d = |u: &Series, v: &Series| distance(u, v).map_err(|e| e.to_string());
        let (ac, ab, bc) = (d(a, c)?, d(a, b)?, d(b, c)?);
        if ac <= ab.max(bc) {
            Ok(())
        } else {
            Err(format!("d(a,c) = {ac} > max({ab}, {bc})"))
        }
    }
}
