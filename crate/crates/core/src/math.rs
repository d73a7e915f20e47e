//! Standard-normal helpers.

/// Standard normal cdf via the complementary error function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cdf_reference_values() {
        assert_relative_eq!(norm_cdf(0.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(norm_cdf(1.0), 0.8413447460685429, max_relative = 1e-14);
        assert_relative_eq!(norm_cdf(-1.96), 0.024997895148220435, max_relative = 1e-13);
    }

    #[test]
    fn cdf_symmetry() {
        for &x in &[0.1, 0.7, 2.3, 5.0] {
            assert_relative_eq!(norm_cdf(x) + norm_cdf(-x), 1.0, max_relative = 1e-15);
        }
    }
}
