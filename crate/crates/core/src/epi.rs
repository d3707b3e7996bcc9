//! Entropy-power sandwich constants, reverse entropy power inequalities and
//! the relative α-entropy against the matched generalized Gaussian.

use serde::{Deserialize, Serialize};

use crate::bounds::{min_entropy_constant, Regime};
use crate::convolution::{convolution_entropies, ConvolutionEntropy, GridConfig};
use crate::density::{NamedDensity, PiecewiseLogLinearDensity, PiecewiseOptions};
use crate::entropy::{renyi_entropy, EntropyOrder};
use crate::error::{invalid, Error, Result};
use crate::special::{ln_beta, log_ratio};

/// `C₋(α) var ≤ N_α ≤ C₊(α) var` for symmetric log-concave densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichConstants {
    pub alpha: f64,
    pub c_minus: f64,
    pub c_plus: f64,
}

fn above_one(alpha: f64) -> Result<f64> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(alpha)
    } else {
        Err(invalid(format!("need a finite order α > 1, got {alpha}")))
    }
}

/// `log C₊(α)`, the entropy power per unit variance of the generalized Gaussian.
pub fn log_c_plus(alpha: f64) -> Result<f64> {
    let a = above_one(alpha)?;
    let r = 3.0 * a - 1.0;
    Ok((r / (a - 1.0)).ln()
        + 2.0 / (1.0 - a) * (2.0 * a / r).ln()
        + 2.0 * ln_beta(0.5, a / (a - 1.0)))
}

/// The lower constant `C₋(α) = min(12, 2 α^{2/(α-1)})`; the branches cross at α*.
pub fn c_minus(alpha: f64) -> Result<f64> {
    let a = above_one(alpha)?;
    Ok(12f64.min(2.0 * (2.0 * log_ratio(a)).exp()))
}

pub fn sandwich_constants(alpha: f64) -> Result<SandwichConstants> {
    Ok(SandwichConstants {
        alpha,
        c_minus: c_minus(alpha)?,
        c_plus: log_c_plus(alpha)?.exp(),
    })
}

/// `C(α) = ½ log C₊(α) - c(α)`: the Rényi entropy of the unit-variance
/// generalized Gaussian minus the smallest entropy at unit variance among
/// symmetric log-concave densities.
pub fn relative_bound_constant(alpha: f64) -> Result<f64> {
    let a = above_one(alpha)?;
    Ok(0.5 * log_c_plus(a)? - min_entropy_constant(a, Regime::Symmetric)?)
}

/// Generalized Gaussian of order `α` with the given variance, on `resolution` segments.
pub fn matched_generalized_gaussian(
    alpha: f64,
    variance: f64,
    resolution: usize,
) -> Result<PiecewiseLogLinearDensity> {
    let a = above_one(alpha)?;
    NamedDensity::GeneralizedGaussian { order: a, variance }.to_piecewise(&PiecewiseOptions {
        resolution,
        truncation_mass: None,
    })
}

/// Potentials of both densities on the common refinement of their knots,
/// restricted to the intersection of the supports.
fn merged_potentials(
    f: &PiecewiseLogLinearDensity,
    g: &PiecewiseLogLinearDensity,
) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (fa, fb) = f.support();
    let (ga, gb) = g.support();
    let lo = fa.max(ga);
    let hi = fb.min(gb);
    if !(hi > lo) {
        return None;
    }
    let mut xs: Vec<f64> = f
        .knots()
        .iter()
        .chain(g.knots())
        .copied()
        .filter(|&x| x > lo && x < hi)
        .chain([lo, hi])
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vf = xs.iter().map(|&x| f.potential_at(x)).collect();
    let vg = xs.iter().map(|&x| g.potential_at(x)).collect();
    Some((xs, vf, vg))
}

/// `log ∫ f g^{α-1}`, exact: on each cell of the merged knots the exponent
/// `-V_f - (α-1) V_g` is affine.
pub fn log_cross_integral(
    f: &PiecewiseLogLinearDensity,
    g: &PiecewiseLogLinearDensity,
    alpha: f64,
) -> Result<f64> {
    if alpha < 1.0 {
        let (fa, fb) = f.support();
        let (ga, gb) = g.support();
        let tol = 1e-12 * (1.0 + fa.abs().max(fb.abs()));
        if fa < ga - tol || fb > gb + tol {
            return Err(Error::Divergent(format!(
                "g^(α-1) is infinite on part of supp f = [{fa}, {fb}] outside supp g = [{ga}, {gb}]"
            )));
        }
    }
    let (xs, vf, vg) = merged_potentials(f, g)
        .ok_or_else(|| Error::Divergent("the supports do not overlap".into()))?;
    let q = alpha - 1.0;
    let terms = (0..xs.len() - 1).map(|i| {
        crate::density::segment::Segment {
            x0: xs[i],
            x1: xs[i + 1],
            v0: vf[i] + q * vg[i],
            v1: vf[i + 1] + q * vg[i + 1],
        }
        .log_power_mass(1.0)
    });
    Ok(crate::density::log_sum_exp(terms))
}

/// Relative α-entropy
/// `I_α(X‖Z) = α/(1-α) · log ∫ (f/‖f‖_α)(g/‖g‖_α)^{α-1}`.
pub fn relative_alpha_entropy(
    x: &PiecewiseLogLinearDensity,
    z: &PiecewiseLogLinearDensity,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) || alpha == 1.0 {
        return Err(invalid(format!(
            "relative α-entropy needs α > 0, α ≠ 1, got {alpha}"
        )));
    }
    let cross = log_cross_integral(x, z, alpha)?;
    let norm_x = x.log_lp_mass(alpha) / alpha;
    let norm_z = z.log_lp_mass(alpha) / alpha;
    Ok(alpha / (1.0 - alpha) * (cross - norm_x - (alpha - 1.0) * norm_z))
}

/// Both sides of `I_α(X‖Z) ≤ h_α(Z) - h_α(X)` with `Z` the generalized
/// Gaussian matched to the variance of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeCheck {
    pub alpha: f64,
    pub variance: f64,
    pub relative: f64,
    pub entropy_gap: f64,
    pub constant: f64,
    /// `entropy_gap - relative`.
    pub gap_slack: f64,
    /// `constant - relative`.
    pub constant_slack: f64,
}

pub fn relative_check(
    x: &PiecewiseLogLinearDensity,
    alpha: f64,
    resolution: usize,
) -> Result<RelativeCheck> {
    let unit = matched_generalized_gaussian(alpha, 1.0, resolution)?;
    relative_check_with(x, &unit, alpha)
}

/// [`relative_check`] reusing a unit-variance generalized Gaussian of order `alpha`.
pub fn relative_check_with(
    x: &PiecewiseLogLinearDensity,
    unit: &PiecewiseLogLinearDensity,
    alpha: f64,
) -> Result<RelativeCheck> {
    let a = above_one(alpha)?;
    if !x.is_symmetric() {
        return Err(Error::RegimeMismatch(
            "the relative-entropy bound needs a symmetric density".into(),
        ));
    }
    let variance = x.variance();
    let z = unit.rescale((unit.variance() / variance).sqrt())?;
    let order = EntropyOrder::new(a)?;
    let relative = relative_alpha_entropy(x, &z, a)?;
    let entropy_gap = renyi_entropy(&z, order) - renyi_entropy(x, order);
    let constant = relative_bound_constant(a)?;
    Ok(RelativeCheck {
        alpha: a,
        variance,
        relative,
        entropy_gap,
        constant,
        gap_slack: entropy_gap - relative,
        constant_slack: constant - relative,
    })
}

/// `N_α(X+Y) / (N_α(X) + N_α(Y))` against its cap for independent `X`, `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpiRatio {
    pub alpha: f64,
    pub regime: Regime,
    pub power_x: f64,
    pub power_y: f64,
    pub power_sum: f64,
    pub ratio: f64,
    /// `C₊/C₋` (symmetric) or `2C₊/C₋` (general).
    pub cap: f64,
    /// `cap (N_α(X) + N_α(Y)) - N_α(X+Y)`.
    pub slack: f64,
    pub grid_change: f64,
}

/// Cap on the entropy-power ratio of a sum in the given regime.
pub fn reverse_epi_cap(alpha: f64, regime: Regime) -> Result<f64> {
    let c = sandwich_constants(alpha)?;
    if regime == Regime::General && alpha < 2.0 {
        return Err(Error::RegimeMismatch(format!(
            "the general reverse inequality needs α ≥ 2, got {alpha}"
        )));
    }
    Ok(match regime {
        Regime::Symmetric => c.c_plus / c.c_minus,
        Regime::General => 2.0 * c.c_plus / c.c_minus,
    })
}

fn epi_ratio(
    x: &PiecewiseLogLinearDensity,
    y: &PiecewiseLogLinearDensity,
    alpha: f64,
    regime: Regime,
    conv: &ConvolutionEntropy,
) -> Result<EpiRatio> {
    let order = EntropyOrder::new(alpha)?;
    let cap = reverse_epi_cap(alpha, regime)?;
    let power_x = (2.0 * renyi_entropy(x, order)).exp();
    let power_y = (2.0 * renyi_entropy(y, order)).exp();
    let h_sum = conv
        .value(alpha)
        .ok_or_else(|| invalid(format!("order {alpha} was not computed")))?;
    let power_sum = (2.0 * h_sum).exp();
    Ok(EpiRatio {
        alpha,
        regime,
        power_x,
        power_y,
        power_sum,
        ratio: power_sum / (power_x + power_y),
        cap,
        slack: cap * (power_x + power_y) - power_sum,
        grid_change: conv.change,
    })
}

fn check_epi_regime(
    x: &PiecewiseLogLinearDensity,
    y: &PiecewiseLogLinearDensity,
    alpha: f64,
    regime: Regime,
) -> Result<()> {
    above_one(alpha)?;
    match regime {
        Regime::Symmetric if !(x.is_symmetric() && y.is_symmetric()) => Err(Error::RegimeMismatch(
            "the symmetric reverse inequality needs both densities symmetric".into(),
        )),
        Regime::General if alpha < 2.0 => Err(Error::RegimeMismatch(format!(
            "the general reverse inequality needs α ≥ 2, got {alpha}"
        ))),
        _ => Ok(()),
    }
}

/// Reverse entropy power inequality for independent `X`, `Y` at one order.
pub fn reverse_epi_check(
    x: &PiecewiseLogLinearDensity,
    y: &PiecewiseLogLinearDensity,
    alpha: f64,
    regime: Regime,
    grid: &GridConfig,
) -> Result<EpiRatio> {
    Ok(reverse_epi_checks(x, y, &[alpha], regime, grid)?.remove(0))
}

/// [`reverse_epi_check`] for several orders sharing one convolution.
pub fn reverse_epi_checks(
    x: &PiecewiseLogLinearDensity,
    y: &PiecewiseLogLinearDensity,
    alphas: &[f64],
    regime: Regime,
    grid: &GridConfig,
) -> Result<Vec<EpiRatio>> {
    for &a in alphas {
        check_epi_regime(x, y, a, regime)?;
    }
    let conv = convolution_entropies(x, y, alphas, grid)?;
    alphas
        .iter()
        .map(|&a| epi_ratio(x, y, a, regime, &conv))
        .collect()
}

/// `h_α(X) + log 2 - h_α(X - Y)` for i.i.d. `X`, `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceCheck {
    pub alpha: f64,
    pub entropy: f64,
    pub difference_entropy: f64,
    pub slack: f64,
    pub grid_change: f64,
}

pub fn difference_entropy_check(
    x: &PiecewiseLogLinearDensity,
    alpha: f64,
    grid: &GridConfig,
) -> Result<DifferenceCheck> {
    Ok(difference_entropy_checks(x, &[alpha], grid)?.remove(0))
}

/// [`difference_entropy_check`] for several orders sharing one convolution.
pub fn difference_entropy_checks(
    x: &PiecewiseLogLinearDensity,
    alphas: &[f64],
    grid: &GridConfig,
) -> Result<Vec<DifferenceCheck>> {
    for &a in alphas {
        if !(a >= 2.0 && a.is_finite()) {
            return Err(Error::RegimeMismatch(format!(
                "the difference bound needs a finite α ≥ 2, got {a}"
            )));
        }
    }
    let conv = convolution_entropies(x, &x.reflect(), alphas, grid)?;
    alphas
        .iter()
        .zip(&conv.values)
        .map(|(&a, &difference_entropy)| {
            let entropy = renyi_entropy(x, EntropyOrder::new(a)?);
            Ok(DifferenceCheck {
                alpha: a,
                entropy,
                difference_entropy,
                slack: entropy + 2f64.ln() - difference_entropy,
                grid_change: conv.change,
            })
        })
        .collect()
}

/// One row of the constants table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRow {
    pub alpha: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub c_alpha: f64,
}

pub fn constants_row(alpha: f64) -> Result<ConstantsRow> {
    let c = sandwich_constants(alpha)?;
    Ok(ConstantsRow {
        alpha,
        c_minus: c.c_minus,
        c_plus: c.c_plus,
        c_alpha: relative_bound_constant(alpha)?,
    })
}
