//! Gamma-family special functions, backed by `statrs`.

use statrs::function::gamma;

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

pub fn digamma(x: f64) -> f64 {
    gamma::digamma(x)
}

/// `log B(a, b)` through log-Gamma.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

pub fn beta(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

/// `log(α) / (α - 1)`, continuous at `α = 1` where it equals 1.
pub fn log_ratio(alpha: f64) -> f64 {
    let d = alpha - 1.0;
    if d.abs() < 1e-8 {
        // log(1+d)/d = 1 - d/2 + d²/3
        1.0 - d / 2.0 + d * d / 3.0
    } else {
        d.ln_1p() / d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn beta_reference_values() {
        assert!((beta(0.5, 2.0) - 4.0 / 3.0).abs() < 1e-12 * 4.0 / 3.0);
        assert!((beta(0.5, 1.0) - 2.0).abs() < 1e-12 * 2.0);
        assert!((beta(0.5, 0.5) - PI).abs() < 1e-12 * PI);
        // B(1/2, 3) = 16/15
        assert!((beta(0.5, 3.0) - 16.0 / 15.0).abs() < 1e-12);
        // B(1/2, 3/2) = π/2
        assert!((beta(0.5, 1.5) - PI / 2.0).abs() < 1e-12 * PI);
    }

    #[test]
    fn log_ratio_is_smooth_at_one() {
        assert_eq!(log_ratio(1.0), 1.0);
        let below = log_ratio(1.0 - 1e-6);
        let above = log_ratio(1.0 + 1e-6);
        assert!((below - 1.0).abs() < 1e-6 && (above - 1.0).abs() < 1e-6);
        assert!((log_ratio(2.0) - 2f64.ln()).abs() < 1e-15);
    }
}
