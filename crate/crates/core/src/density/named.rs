use serde::{Deserialize, Serialize};

use super::segment::{one_minus_exp_over, unit_moment};
use super::PiecewiseLogLinearDensity;
use crate::entropy::EntropyOrder;
use crate::error::{invalid, Error, Result};
use crate::special::{digamma, ln_beta, log_ratio};

/// Tail mass discarded when an unbounded family is truncated.
pub const DEFAULT_TRUNCATION_MASS: f64 = 1e-12;

/// Symbolic log-concave families with closed-form moments and entropies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NamedDensity {
    /// Uniform on `[-halfwidth, halfwidth]`.
    Uniform { halfwidth: f64 },
    /// `(λ/2) e^{-λ|x|}`.
    #[serde(rename = "two_sided_exp")]
    TwoSidedExponential { rate: f64 },
    /// `λ e^{-λx}` on `x >= 0`.
    #[serde(rename = "one_sided_exp")]
    OneSidedExponential { rate: f64 },
    /// `c₀ (1 + (1-α)(c₁x)²)_+^{1/(α-1)}` for `α > 1`, parameterized by its
    /// variance. The support is `[-R, R]` with `R = 1 / (c₁ √(α-1))`.
    GeneralizedGaussian { order: f64, variance: f64 },
    /// Flat on `[-a, a]` with exponential decay of rate `γ` out to `|x| = a + b`.
    Extremal { a: f64, b: f64, gamma: f64 },
}

/// Resolution settings for [`NamedDensity::to_piecewise`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseOptions {
    /// Segment count used for families whose potential is not piecewise linear.
    pub resolution: usize,
    /// Tail mass cut from unbounded families; `None` refuses to truncate.
    ///
    /// The tail of `f^α` carries roughly `(truncation mass)^α`, so orders
    /// below one need a proportionally deeper cut for the same accuracy.
    pub truncation_mass: Option<f64>,
}

impl Default for PiecewiseOptions {
    fn default() -> Self {
        Self {
            resolution: 10_000,
            truncation_mass: Some(DEFAULT_TRUNCATION_MASS),
        }
    }
}

impl NamedDensity {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!(
                    "{name} must be nonnegative and finite, got {v}"
                )))
            }
        };
        match *self {
            NamedDensity::Uniform { halfwidth } => pos("halfwidth", halfwidth),
            NamedDensity::TwoSidedExponential { rate }
            | NamedDensity::OneSidedExponential { rate } => pos("rate", rate),
            NamedDensity::GeneralizedGaussian { order, variance } => {
                pos("variance", variance)?;
                if order > 1.0 && order.is_finite() {
                    Ok(())
                } else {
                    Err(invalid(format!(
                        "generalized Gaussian order must exceed 1 (log-concave, compact support), got {order}"
                    )))
                }
            }
            NamedDensity::Extremal { a, b, gamma } => {
                nonneg("a", a)?;
                nonneg("b", b)?;
                nonneg("gamma", gamma)?;
                if a + b > 0.0 {
                    Ok(())
                } else {
                    Err(invalid("extremal density needs a + b > 0"))
                }
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, NamedDensity::OneSidedExponential { .. })
    }

    pub fn has_bounded_support(&self) -> bool {
        !matches!(
            self,
            NamedDensity::TwoSidedExponential { .. } | NamedDensity::OneSidedExponential { .. }
        )
    }

    pub fn mean(&self) -> f64 {
        match *self {
            NamedDensity::OneSidedExponential { rate } => 1.0 / rate,
            _ => 0.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            NamedDensity::Uniform { halfwidth } => halfwidth * halfwidth / 3.0,
            NamedDensity::TwoSidedExponential { rate } => 2.0 / (rate * rate),
            NamedDensity::OneSidedExponential { rate } => 1.0 / (rate * rate),
            NamedDensity::GeneralizedGaussian { variance, .. } => variance,
            NamedDensity::Extremal { a, b, gamma } => {
                let c = extremal_height(a, b, gamma);
                let z = gamma * b;
                let tail = b
                    * (a * a * unit_moment(0, z)
                        + 2.0 * a * b * unit_moment(1, z)
                        + b * b * unit_moment(2, z));
                2.0 * c * (a * a * a / 3.0 + tail)
            }
        }
    }

    /// Rényi entropy from the family's closed form.
    pub fn renyi_entropy(&self, order: EntropyOrder) -> f64 {
        match *self {
            NamedDensity::Uniform { halfwidth } => (2.0 * halfwidth).ln(),
            NamedDensity::TwoSidedExponential { rate } => {
                exponential_entropy((2.0 / rate).ln(), order)
            }
            NamedDensity::OneSidedExponential { rate } => exponential_entropy(-rate.ln(), order),
            NamedDensity::GeneralizedGaussian { order: q, variance } => {
                let beta = 1.0 / (q - 1.0);
                let r = generalized_gaussian_radius(q, variance);
                let ln_c0 = -r.ln() - ln_beta(0.5, beta + 1.0);
                match order {
                    EntropyOrder::Zero => (2.0 * r).ln(),
                    EntropyOrder::Infinity => -ln_c0,
                    EntropyOrder::One => {
                        // E log(1 - u²) = ψ(β + 1) - ψ(β + 3/2)
                        -ln_c0 - beta * (digamma(beta + 1.0) - digamma(beta + 1.5))
                    }
                    EntropyOrder::Finite(p) => {
                        let log_mass = p * ln_c0 + r.ln() + ln_beta(0.5, p * beta + 1.0);
                        log_mass / (1.0 - p)
                    }
                }
            }
            NamedDensity::Extremal { a, b, gamma } => {
                let c = extremal_height(a, b, gamma);
                match order {
                    EntropyOrder::Zero => (2.0 * (a + b)).ln(),
                    EntropyOrder::Infinity => -c.ln(),
                    EntropyOrder::One => {
                        -c.ln() + 2.0 * c * gamma * b * b * unit_moment(1, gamma * b)
                    }
                    EntropyOrder::Finite(p) => {
                        let mass = 2.0 * c.powf(p) * (a + b * one_minus_exp_over(p * gamma * b));
                        mass.ln() / (1.0 - p)
                    }
                }
            }
        }
    }

    /// Converts to the piecewise log-linear representation.
    ///
    /// Exponential families are represented exactly up to truncation of the
    /// tail mass; the generalized Gaussian is interpolated on `resolution`
    /// segments and rescaled so its variance is exact.
    pub fn to_piecewise(&self, opts: &PiecewiseOptions) -> Result<PiecewiseLogLinearDensity> {
        self.validate()?;
        let cut = || -> Result<f64> {
            let m = opts.truncation_mass.ok_or(Error::UnboundedSupport)?;
            if !(m > 0.0 && m < 1.0) {
                return Err(invalid(format!(
                    "truncation mass must lie in (0,1), got {m}"
                )));
            }
            Ok(-m.ln())
        };
        match *self {
            NamedDensity::Uniform { halfwidth } => {
                PiecewiseLogLinearDensity::from_half(&[0.0, halfwidth], &[0.0, 0.0])
            }
            NamedDensity::TwoSidedExponential { rate } => {
                let t = cut()? / rate;
                PiecewiseLogLinearDensity::from_half(&[0.0, t], &[0.0, rate * t])
            }
            NamedDensity::OneSidedExponential { rate } => {
                let t = cut()? / rate;
                PiecewiseLogLinearDensity::new(vec![0.0, t], vec![0.0, rate * t])
            }
            NamedDensity::GeneralizedGaussian { order, variance } => {
                let unit = generalized_gaussian_shape(order, opts.resolution)?;
                let lambda = (unit.variance() / variance).sqrt();
                unit.rescale(lambda)
            }
            NamedDensity::Extremal { a, b, gamma } => {
                let mut knots = vec![0.0];
                let mut pot = vec![0.0];
                if a > 0.0 {
                    knots.push(a);
                    pot.push(0.0);
                }
                if b > 0.0 {
                    knots.push(a + b);
                    pot.push(gamma * b);
                }
                PiecewiseLogLinearDensity::from_half(&knots, &pot)
            }
        }
    }
}

fn exponential_entropy(log_scale: f64, order: EntropyOrder) -> f64 {
    match order {
        EntropyOrder::Zero => f64::INFINITY,
        EntropyOrder::Infinity => log_scale,
        EntropyOrder::One => log_scale + 1.0,
        EntropyOrder::Finite(p) => log_scale + log_ratio(p),
    }
}

/// Height `c` of the extremal density, fixed by `∫ f = 1`.
pub fn extremal_height(a: f64, b: f64, gamma: f64) -> f64 {
    0.5 / (a + b * one_minus_exp_over(gamma * b))
}

/// Support radius of the order-`q` generalized Gaussian with the given variance.
pub fn generalized_gaussian_radius(q: f64, variance: f64) -> f64 {
    let beta = 1.0 / (q - 1.0);
    (variance * (2.0 * beta + 3.0)).sqrt()
}

/// Piecewise interpolation of `(1 - u²)^β` on `[-1, 1]`, `β = 1/(q-1)`.
///
/// Knots are `u = sin θ` on a uniform θ-grid, which clusters them where the
/// potential steepens; the last grid step before `|u| = 1` is dropped since
/// the potential is infinite there.
fn generalized_gaussian_shape(q: f64, resolution: usize) -> Result<PiecewiseLogLinearDensity> {
    if resolution < 4 {
        return Err(invalid(format!(
            "resolution must be at least 4 segments, got {resolution}"
        )));
    }
    let beta = 1.0 / (q - 1.0);
    let per_side = resolution / 2;
    let step = std::f64::consts::FRAC_PI_2 / per_side as f64;
    let mut knots = Vec::with_capacity(per_side);
    let mut pot = Vec::with_capacity(per_side);
    for j in 0..per_side {
        let theta = j as f64 * step;
        knots.push(theta.sin());
        pot.push(-2.0 * beta * theta.cos().ln());
    }
    PiecewiseLogLinearDensity::from_half(&knots, &pot)
}

/// JSON density description accepted by the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DensitySpec {
    Uniform {
        halfwidth: f64,
    },
    #[serde(rename = "two_sided_exp")]
    TwoSidedExponential {
        rate: f64,
    },
    #[serde(rename = "one_sided_exp")]
    OneSidedExponential {
        rate: f64,
    },
    GeneralizedGaussian {
        order: f64,
        variance: f64,
    },
    Extremal {
        a: f64,
        b: f64,
        gamma: f64,
    },
    Piecewise {
        knots: Vec<f64>,
        potential: Vec<f64>,
    },
}

impl DensitySpec {
    pub fn named(&self) -> Option<NamedDensity> {
        Some(match *self {
            DensitySpec::Uniform { halfwidth } => NamedDensity::Uniform { halfwidth },
            DensitySpec::TwoSidedExponential { rate } => NamedDensity::TwoSidedExponential { rate },
            DensitySpec::OneSidedExponential { rate } => NamedDensity::OneSidedExponential { rate },
            DensitySpec::GeneralizedGaussian { order, variance } => {
                NamedDensity::GeneralizedGaussian { order, variance }
            }
            DensitySpec::Extremal { a, b, gamma } => NamedDensity::Extremal { a, b, gamma },
            DensitySpec::Piecewise { .. } => return None,
        })
    }

    pub fn to_piecewise(&self, opts: &PiecewiseOptions) -> Result<PiecewiseLogLinearDensity> {
        match self {
            DensitySpec::Piecewise { knots, potential } => {
                PiecewiseLogLinearDensity::new(knots.clone(), potential.clone())
            }
            other => other.named().expect("named variant").to_piecewise(opts),
        }
    }
}

impl From<NamedDensity> for DensitySpec {
    fn from(d: NamedDensity) -> Self {
        match d {
            NamedDensity::Uniform { halfwidth } => DensitySpec::Uniform { halfwidth },
            NamedDensity::TwoSidedExponential { rate } => DensitySpec::TwoSidedExponential { rate },
            NamedDensity::OneSidedExponential { rate } => DensitySpec::OneSidedExponential { rate },
            NamedDensity::GeneralizedGaussian { order, variance } => {
                DensitySpec::GeneralizedGaussian { order, variance }
            }
            NamedDensity::Extremal { a, b, gamma } => DensitySpec::Extremal { a, b, gamma },
        }
    }
}
