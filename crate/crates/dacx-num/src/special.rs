//! Gamma-function helpers.

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `Γ(x)` for `x > 0`; overflows to infinity past `x ≈ 171.6`.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_gamma() {
        assert_relative_eq!(
            gamma(0.5),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gamma(3.5),
            15.0 / 8.0 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn ln_factorial_matches_product() {
        let direct: f64 = (1..=20).map(|k| (k as f64).ln()).sum();
        assert_relative_eq!(ln_factorial(20), direct, max_relative = 1e-14);
    }
}
