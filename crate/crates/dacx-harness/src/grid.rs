//! Two-scale sample grids.

use crate::HarnessError;

/// Sample grid: `outer_samples` uniform points of `[x_lo, x_hi]` plus
/// `inner_samples` uniform points of `X = x/η ∈ [−K, K]` that fall in the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    /// Inner window bound `K`.
    pub k: f64,
    pub outer_samples: usize,
    pub inner_samples: usize,
    /// Positive and decreasing.
    pub etas: Vec<f64>,
    /// Admits points where the solution is exponentially large.
    pub allow_repulsive: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_lo: -1.0,
            x_hi: 0.0,
            k: 4.0,
            outer_samples: 21,
            inner_samples: 9,
            etas: vec![0.2, 0.1, 0.05, 0.025],
            allow_repulsive: false,
        }
    }
}

impl GridSpec {
    pub fn with_etas(etas: Vec<f64>) -> Self {
        Self {
            etas,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.x_lo < self.x_hi) || !self.x_lo.is_finite() || !self.x_hi.is_finite() {
            return Err(HarnessError::Config(format!(
                "empty interval [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        if !(self.k > 0.0) {
            return Err(HarnessError::Config(format!(
                "inner window K = {} must be positive",
                self.k
            )));
        }
        if self.outer_samples < 2 {
            return Err(HarnessError::Config(
                "at least two outer samples are needed".into(),
            ));
        }
        if self.etas.iter().any(|e| !(*e > 0.0)) {
            return Err(HarnessError::Config(format!(
                "η values must be positive: {:?}",
                self.etas
            )));
        }
        if self.etas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HarnessError::Config(format!(
                "η values must be decreasing: {:?}",
                self.etas
            )));
        }
        Ok(())
    }

    /// Sorted, deduplicated sample points at scale `η`.
    pub fn points(&self, eta: f64) -> Vec<f64> {
        let mut xs: Vec<f64> = (0..self.outer_samples)
            .map(|i| {
                self.x_lo + (self.x_hi - self.x_lo) * i as f64 / (self.outer_samples - 1) as f64
            })
            .collect();
        if self.inner_samples >= 2 {
            xs.extend(
                (0..self.inner_samples)
                    .map(|i| {
                        eta * (-self.k + 2.0 * self.k * i as f64 / (self.inner_samples - 1) as f64)
                    })
                    .filter(|x| *x >= self.x_lo && *x <= self.x_hi),
            );
        }
        xs.sort_by(f64::total_cmp);
        let tol = 1e-12 * (self.x_hi - self.x_lo);
        xs.dedup_by(|a, b| (*a - *b).abs() <= tol);
        xs
    }
}
