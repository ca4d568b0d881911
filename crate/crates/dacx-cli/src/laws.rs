//! Seeded runs of the algebra-law suite on random rational series.

use dacx_core::strategies::{laws, residue_free_series, series, series_pair, series_triple};
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};

#[derive(Debug, Clone, PartialEq)]
pub struct LawResult {
    pub name: &'static str,
    pub cases: u32,
    /// First violation after shrinking.
    pub failure: Option<String>,
}

fn runner(seed: u64, cases: u32) -> TestRunner {
    let mut bytes = [0u8; 32];
    for (i, chunk) in bytes.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&seed.wrapping_add(i as u64).to_le_bytes());
    }
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

fn check<T: std::fmt::Debug>(
    name: &'static str,
    seed: u64,
    cases: u32,
    strategy: impl Strategy<Value = T>,
    law: impl Fn(T) -> Result<(), String>,
) -> LawResult {
    let outcome = runner(seed, cases).run(&strategy, |v| law(v).map_err(TestCaseError::fail));
    let failure = match outcome {
        Ok(()) => None,
        Err(TestError::Fail(reason, value)) => Some(format!("{reason}; minimal input: {value:?}")),
        Err(TestError::Abort(reason)) => Some(format!("aborted: {reason}")),
    };
    LawResult {
        name,
        cases,
        failure,
    }
}

/// Runs every law on `cases` random inputs drawn from `seed`.
pub fn check_laws(seed: u64, cases: u32) -> Vec<LawResult> {
    vec![
        check(
            "product commutativity",
            seed,
            cases,
            series_pair(),
            |(y, z)| laws::commutative(&y, &z),
        ),
        check(
            "product associativity",
            seed,
            cases,
            series_triple(),
            |(y, z, w)| laws::associative(&y, &z, &w),
        ),
        check(
            "valuation superadditivity",
            seed,
            cases,
            series_pair(),
            |(y, z)| laws::valuation_is_superadditive(&y, &z),
        ),
        check("matching identity", seed, cases, series(), |y| {
            laws::matching_identity(&y)
        }),
        check("match_reconstruct round trip", seed, cases, series(), |y| {
            laws::round_trip(&y)
        }),
        check(
            "differentiate ∘ integrate",
            seed,
            cases,
            residue_free_series(),
            |y| laws::differentiate_integrate(&y),
        ),
        check(
            "ultrametric inequality",
            seed,
            cases,
            series_triple(),
            |(a, b, c)| laws::ultrametric(&a, &b, &c),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_hold_on_a_small_seeded_run() {
        for r in check_laws(7, 16) {
            assert!(r.failure.is_none(), "{}: {:?}", r.name, r.failure);
        }
    }

    #[test]
    fn a_broken_law_is_reported() {
        let r = check(
            "always fails",
            1,
            4,
            series(),
            |_| Err("broken".to_string()),
        );
        assert!(r.failure.unwrap().contains("broken"));
    }
}
