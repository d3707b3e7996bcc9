//! Rényi entropies of every order and the entropy power.
//!
//! `h_α(f) = (1-α)⁻¹ log ∫ f^α` for finite `α ∉ {0, 1}`, with the limits
//! `h_0 = log |supp f|`, `h_1 = -∫ f log f` and `h_∞ = -log sup f`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::PiecewiseLogLinearDensity;
use crate::error::{invalid, Error, Result};

/// Order of a Rényi entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EntropyOrder {
    Zero,
    /// `α > 0`, `α ≠ 1`, finite.
    Finite(f64),
    One,
    Infinity,
}

impl EntropyOrder {
    /// Classifies a real order; 0, 1 and `+inf` map to the limit variants.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(invalid(format!(
                "entropy order must be nonnegative, got {alpha}"
            )));
        }
        Ok(if alpha == 0.0 {
            EntropyOrder::Zero
        } else if alpha == 1.0 {
            EntropyOrder::One
        } else if alpha.is_infinite() {
            EntropyOrder::Infinity
        } else {
            EntropyOrder::Finite(alpha)
        })
    }

    /// Like [`EntropyOrder::new`] but rejects the limit orders.
    pub fn finite(alpha: f64) -> Result<Self> {
        match Self::new(alpha)? {
            o @ EntropyOrder::Finite(_) => Ok(o),
            _ => Err(invalid(format!(
                "expected a finite order other than 0 and 1, got {alpha}"
            ))),
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            EntropyOrder::Zero => 0.0,
            EntropyOrder::Finite(a) => a,
            EntropyOrder::One => 1.0,
            EntropyOrder::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for EntropyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EntropyOrder::Infinity => f.write_str("inf"),
            o => write!(f, "{}", o.value()),
        }
    }
}

impl FromStr for EntropyOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "+inf") {
            return Ok(EntropyOrder::Infinity);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| invalid(format!("cannot parse entropy order '{s}'")))?;
        Self::new(v)
    }
}

/// Rényi entropy of order `order`, in nats.
pub fn renyi_entropy(f: &PiecewiseLogLinearDensity, order: EntropyOrder) -> f64 {
    match order {
        EntropyOrder::Zero => f.support_length().ln(),
        EntropyOrder::One => f.segments().map(|s| s.shannon_part()).sum(),
        EntropyOrder::Infinity => f.min_potential(),
        EntropyOrder::Finite(a) => f.log_lp_mass(a) / (1.0 - a),
    }
}

/// `N_α = exp(2 h_α)`.
pub fn entropy_power(f: &PiecewiseLogLinearDensity, order: EntropyOrder) -> f64 {
    (2.0 * renyi_entropy(f, order)).exp()
}

/// `log ∫ f^p` and `log(p ∫ f^p)` sampled on a grid of orders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityProbe {
    pub p_grid: Vec<f64>,
    pub log_mass: Vec<f64>,
    pub log_p_mass: Vec<f64>,
}

impl ConvexityProbe {
    /// Smallest second difference of `log ∫ f^p`; nonnegative up to rounding
    /// because `p ↦ ∫ f^p` is log-convex for every density.
    pub fn log_mass_convexity(&self) -> f64 {
        second_differences(&self.p_grid, &self.log_mass).fold(f64::INFINITY, f64::min)
    }

    /// Smallest negated second difference of `log(p ∫ f^p)`; nonnegative up to
    /// rounding when `f` is log-concave.
    pub fn p_mass_concavity(&self) -> f64 {
        second_differences(&self.p_grid, &self.log_p_mass)
            .map(|d| -d)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `2·(interpolated - actual)` at each interior point; on an equally spaced
/// grid this is the ordinary second difference `y₀ - 2y₁ + y₂`.
fn second_differences<'a>(x: &'a [f64], y: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    (1..x.len().saturating_sub(1)).map(move |i| {
        let t = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
        let interp = (1.0 - t) * y[i - 1] + t * y[i + 1];
        2.0 * (interp - y[i])
    })
}

pub fn lp_mass_convexity_probe(
    f: &PiecewiseLogLinearDensity,
    p_grid: &[f64],
) -> Result<ConvexityProbe> {
    if p_grid.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(invalid("probe orders must be positive and finite"));
    }
    if p_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("probe orders must be strictly increasing"));
    }
    let log_mass: Vec<f64> = p_grid.iter().map(|&p| f.log_lp_mass(p)).collect();
    let log_p_mass = p_grid
        .iter()
        .zip(&log_mass)
        .map(|(p, m)| p.ln() + m)
        .collect();
    Ok(ConvexityProbe {
        p_grid: p_grid.to_vec(),
        log_mass,
        log_p_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{NamedDensity, PiecewiseOptions};

    fn uniform() -> PiecewiseLogLinearDensity {
        NamedDensity::Uniform { halfwidth: 1.0 }
            .to_piecewise(&PiecewiseOptions::default())
            .unwrap()
    }

    #[test]
    fn order_classification() {
        assert_eq!(EntropyOrder::new(0.0).unwrap(), EntropyOrder::Zero);
        assert_eq!(EntropyOrder::new(1.0).unwrap(), EntropyOrder::One);
        assert_eq!(
            EntropyOrder::new(f64::INFINITY).unwrap(),
            EntropyOrder::Infinity
        );
        assert_eq!(EntropyOrder::new(2.0).unwrap(), EntropyOrder::Finite(2.0));
        assert!(EntropyOrder::new(-1.0).is_err());
        assert!(EntropyOrder::new(f64::NAN).is_err());
        assert!(EntropyOrder::finite(1.0).is_err());
        assert_eq!(
            "inf".parse::<EntropyOrder>().unwrap(),
            EntropyOrder::Infinity
        );
        assert_eq!(
            "0.5".parse::<EntropyOrder>().unwrap(),
            EntropyOrder::Finite(0.5)
        );
        assert_eq!(EntropyOrder::Finite(2.5).to_string(), "2.5");
    }

    #[test]
    fn uniform_entropies_coincide() {
        let u = uniform();
        for o in [
            EntropyOrder::Zero,
            EntropyOrder::One,
            EntropyOrder::Infinity,
            EntropyOrder::Finite(0.3),
            EntropyOrder::Finite(7.0),
        ] {
            assert!((renyi_entropy(&u, o) - 2f64.ln()).abs() < 1e-14, "{o}");
        }
        assert!((entropy_power(&u, EntropyOrder::Finite(2.0)) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn second_differences_match_plain_formula_on_even_grid() {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, 4.0, 9.0];
        let d: Vec<f64> = second_differences(&x, &y).collect();
        assert_eq!(d, vec![2.0]);
    }

    #[test]
    fn probe_rejects_unsorted_grid() {
        assert!(lp_mass_convexity_probe(&uniform(), &[1.0, 0.5]).is_err());
        assert!(lp_mass_convexity_probe(&uniform(), &[0.0, 0.5]).is_err());
    }
}
