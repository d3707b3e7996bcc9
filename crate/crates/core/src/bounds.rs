//! The threshold order α* and the variance lower bounds on Rényi entropy.
//!
//! For a symmetric log-concave density and every `α > 0`,
//!
//! ```text
//! h_α(X) ≥ ½ log var(X) + min(½ log 12, ½ log 2 + log α / (α - 1)),
//! ```
//!
//! with the uniform density extremal for `α ≤ α*` and the two-sided
//! exponential for `α ≥ α*`. Here α* is the root above 1 of
//! `2 log α = (α - 1) log 6`. Without symmetry, for `α ≥ 2`, the constant is
//! `log α / (α - 1)`, attained by the one-sided exponential.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::density::PiecewiseLogLinearDensity;
use crate::entropy::{renyi_entropy, EntropyOrder};
use crate::error::{invalid, Error, Result};
use crate::interval::{bit_size, RationalInterval};
use crate::special::log_ratio;

/// Largest numerator/denominator size, in bits, any α* computation may use.
pub const ALPHA_STAR_BIT_BUDGET: u64 = 1_000_000;

/// Width of the shared enclosure returned by [`alpha_star_enclosure`].
pub const DEFAULT_ENCLOSURE_WIDTH: &str = "1e-30";

/// Sign of `α² - 6^{α-1}` at `α = p/q`, decided by comparing the integers
/// `p^{2q}` and `6^{p-q} q^{2q}`. Positive below α*, negative above (for `α > 1`).
pub fn exact_power_sign(p: &BigInt, q: &BigInt) -> Result<Ordering> {
    if !q.is_positive() || !p.is_positive() || p <= q {
        return Err(invalid("exact power test needs p > q > 0"));
    }
    let q_exp = q
        .to_u32()
        .ok_or_else(|| budget("denominator too large for exact powers"))?;
    let d_exp = (p - q)
        .to_u32()
        .ok_or_else(|| budget("exponent too large for exact powers"))?;
    let est_bits = 2 * u64::from(q_exp) * p.bits().max(q.bits()) + u64::from(d_exp) * 3;
    if est_bits > ALPHA_STAR_BIT_BUDGET {
        return Err(budget(format!(
            "exact powers would need about {est_bits} bits"
        )));
    }
    let left = p.pow(2 * q_exp);
    let right = BigInt::from(6).pow(d_exp) * q.pow(2 * q_exp);
    Ok(left.cmp(&right))
}

fn budget(msg: impl Into<String>) -> Error {
    Error::BudgetExceeded(msg.into())
}

/// Enclosure of `atanh(z) = Σ z^{2k+1}/(2k+1)` for rational `|z| ≤ 1/2`.
///
/// Runs two fixed-point sums with `prec + 32` fractional bits, one rounding
/// every step down and one rounding up, and adds the geometric tail bound
/// `|z|^{2k+3} / ((2k+3)(1 - z²))` to the upper sum.
fn atanh_enclosure(z: &BigRational, prec: u32) -> RationalInterval {
    debug_assert!(z.abs() <= BigRational::new(1.into(), 2.into()));
    if z.is_negative() {
        return -&atanh_enclosure(&-z, prec);
    }
    let w = prec as usize + 32;
    let n = z.numer();
    let d = z.denom();
    let floor_div = |a: &BigInt, b: &BigInt| a / b;
    let ceil_div = |a: &BigInt, b: &BigInt| (a + b - BigInt::one()) / b;
    let scaled = |v: &BigInt| v << w;
    let n2 = n * n;
    let d2 = d * d;
    let x2_lo = floor_div(&scaled(&n2), &d2);
    let x2_hi = ceil_div(&scaled(&n2), &d2);
    let mut p_lo = floor_div(&scaled(n), d);
    let mut p_hi = ceil_div(&scaled(n), d);
    let mut s_lo = BigInt::zero();
    let mut s_hi = BigInt::zero();
    let unit = BigInt::one() << w;
    let one_minus_z2 = &unit - &x2_hi;
    let stop = BigInt::one() << 30usize;
    let mut k: u64 = 0;
    loop {
        let den = BigInt::from(2 * k + 1);
        s_lo += floor_div(&p_lo, &den);
        s_hi += ceil_div(&p_hi, &den);
        p_lo = (&p_lo * &x2_lo) >> w;
        p_hi = ceil_div(&(&p_hi * &x2_hi), &unit);
        let tail = ceil_div(&(&p_hi << w), &(BigInt::from(2 * k + 3) * &one_minus_z2));
        if tail < stop {
            let den = BigRational::from_integer(unit);
            let lo = BigRational::from_integer(s_lo) / &den;
            let hi = BigRational::from_integer(s_hi + tail) / den;
            return RationalInterval::new(lo, hi).expect("ordered sums");
        }
        k += 1;
    }
}

/// Enclosure of `ln x` for rational `x` in `[1/3, 3]`, to about `prec` bits.
pub fn ln_enclosure(x: &BigRational, prec: u32) -> Result<RationalInterval> {
    let lo = BigRational::new(1.into(), 3.into());
    let hi = BigRational::from_integer(3.into());
    if *x < lo || *x > hi {
        return Err(invalid(format!("ln enclosure supports [1/3, 3], got {x}")));
    }
    let one = BigRational::one();
    let z = (x - &one) / (x + &one);
    let a = atanh_enclosure(&z, prec + 1);
    Ok(a.scale(&BigRational::from_integer(2.into())))
}

/// Enclosure of `ln 6 = 4 atanh(1/3) + 2 atanh(1/5)`.
pub fn ln6_enclosure(prec: u32) -> RationalInterval {
    let t3 = atanh_enclosure(&BigRational::new(1.into(), 3.into()), prec + 3);
    let t5 = atanh_enclosure(&BigRational::new(1.into(), 5.into()), prec + 3);
    (&t3.scale(&BigRational::from_integer(4.into()))
        + &t5.scale(&BigRational::from_integer(2.into())))
        .round_outward(prec)
}

/// Certified sign of `2 ln c - (c - 1) ln 6`, or `None` if `prec` bits do not
/// separate it from zero.
fn log_sign(c: &BigRational, prec: u32, ln6: &RationalInterval) -> Result<Option<Ordering>> {
    let ln_c = ln_enclosure(c, prec)?;
    let two = BigRational::from_integer(2.into());
    let value = &ln_c.scale(&two) - &ln6.scale(&(c - BigRational::one()));
    Ok(value.sign().filter(|s| *s != Ordering::Equal))
}

/// Sign at a candidate, exact when the integer powers are small.
fn sign_at(c: &BigRational, prec: u32, ln6: &RationalInterval) -> Result<Option<Ordering>> {
    if c.denom().bits() <= 12 {
        if let Ok(s) = exact_power_sign(c.numer(), c.denom()) {
            return Ok(Some(s));
        }
    }
    log_sign(c, prec, ln6)
}

/// Rational interval of width at most `width_bound` containing α*.
///
/// Bisection starts from the bracket `[6/5, 13/10]`, whose endpoint signs are
/// decided by exact integer powers. Interior candidates are decided with
/// certified enclosures of `ln`, at a precision raised on demand; if the
/// midpoint is too close to the root, the 3/8 and 5/8 points are tried
/// instead, one of which is always well separated from it.
pub fn alpha_star(width_bound: &BigRational) -> Result<RationalInterval> {
    if !width_bound.is_positive() {
        return Err(invalid("width bound must be positive"));
    }
    // bits needed to resolve the requested width
    let need =
        (width_bound.denom().bits() as i64 - width_bound.numer().bits() as i64 + 1).max(1) as u64;
    if need + 64 > ALPHA_STAR_BIT_BUDGET {
        return Err(budget(format!(
            "width bound needs about {need} bits of precision"
        )));
    }
    let mut lo = BigRational::new(6.into(), 5.into());
    let mut hi = BigRational::new(13.into(), 10.into());
    debug_assert_eq!(exact_power_sign(lo.numer(), lo.denom())?, Ordering::Greater);
    debug_assert_eq!(exact_power_sign(hi.numer(), hi.denom())?, Ordering::Less);

    let mut prec = (need as u32 + 32).max(64);
    let mut ln6 = ln6_enclosure(prec);
    let fractions = [(1, 2), (3, 8), (5, 8)];
    while &hi - &lo > *width_bound {
        let w = &hi - &lo;
        let mut moved = false;
        while !moved {
            for &(n, d) in &fractions {
                let c = &lo + &w * BigRational::new(n.into(), d.into());
                match sign_at(&c, prec, &ln6)? {
                    Some(Ordering::Greater) => lo = c,
                    Some(Ordering::Less) => hi = c,
                    Some(Ordering::Equal) => return Ok(RationalInterval::point(c)),
                    None => continue,
                }
                moved = true;
                break;
            }
            if !moved {
                prec *= 2;
                if u64::from(prec) > ALPHA_STAR_BIT_BUDGET {
                    return Err(budget("log enclosure precision exceeded the bit budget"));
                }
                ln6 = ln6_enclosure(prec);
            }
        }
    }
    debug_assert!(bit_size(&lo) < ALPHA_STAR_BIT_BUDGET);
    RationalInterval::new(lo, hi)
}

/// Shared α* enclosure of width [`DEFAULT_ENCLOSURE_WIDTH`], computed once.
pub fn alpha_star_enclosure() -> &'static RationalInterval {
    static CELL: OnceLock<RationalInterval> = OnceLock::new();
    CELL.get_or_init(|| {
        let w = crate::interval::parse_rational(DEFAULT_ENCLOSURE_WIDTH).expect("constant parses");
        alpha_star(&w).expect("default enclosure is within budget")
    })
}

/// Midpoint of the shared enclosure, for floating-point consumers.
pub fn alpha_star_f64() -> f64 {
    alpha_star_enclosure().mid_f64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Symmetric log-concave densities, any `α > 0`.
    Symmetric,
    /// Arbitrary log-concave densities, `α ≥ 2`.
    General,
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symmetric" => Ok(Regime::Symmetric),
            "general" => Ok(Regime::General),
            _ => Err(invalid(format!(
                "unknown regime '{s}' (expected symmetric or general)"
            ))),
        }
    }
}

/// Density attaining the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremizer {
    Uniform,
    TwoSidedExponential,
    OneSidedExponential,
}

fn order_value(alpha: f64) -> Result<f64> {
    EntropyOrder::new(alpha)?;
    if alpha == 0.0 {
        return Err(invalid("the bound needs α > 0"));
    }
    Ok(alpha)
}

fn check_regime(alpha: f64, regime: Regime) -> Result<()> {
    if regime == Regime::General && alpha < 2.0 {
        return Err(Error::RegimeMismatch(format!(
            "the general (non-symmetric) bound is only known for α ≥ 2, got {alpha}"
        )));
    }
    Ok(())
}

/// The additive constant `c(α)` in `h_α ≥ ½ log var + c(α)`.
pub fn min_entropy_constant(alpha: f64, regime: Regime) -> Result<f64> {
    let alpha = order_value(alpha)?;
    check_regime(alpha, regime)?;
    let lr = if alpha.is_infinite() {
        0.0
    } else {
        log_ratio(alpha)
    };
    Ok(match regime {
        Regime::Symmetric => (0.5 * 12f64.ln()).min(0.5 * 2f64.ln() + lr),
        Regime::General => lr,
    })
}

/// A fully evaluated lower bound for one order and variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub regime: Regime,
    pub alpha: f64,
    pub constant: f64,
    pub extremizer: Extremizer,
    pub variance: f64,
    /// `½ log variance + constant`.
    pub value: f64,
}

impl BoundSpec {
    pub fn new(alpha: f64, regime: Regime, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(invalid(format!(
                "variance must be positive, got {variance}"
            )));
        }
        let constant = min_entropy_constant(alpha, regime)?;
        let extremizer = match regime {
            Regime::General => Extremizer::OneSidedExponential,
            Regime::Symmetric if alpha <= alpha_star_f64() => Extremizer::Uniform,
            Regime::Symmetric => Extremizer::TwoSidedExponential,
        };
        Ok(Self {
            regime,
            alpha,
            constant,
            extremizer,
            variance,
            value: 0.5 * variance.ln() + constant,
        })
    }
}

/// `h_α(f) - ½ log var(f) - c(α)`; nonnegative for every admissible density.
pub fn theorem_slack(f: &PiecewiseLogLinearDensity, alpha: f64, regime: Regime) -> Result<f64> {
    if regime == Regime::Symmetric && !f.is_symmetric() {
        return Err(Error::RegimeMismatch(
            "symmetric regime needs a symmetric density".into(),
        ));
    }
    let constant = min_entropy_constant(alpha, regime)?;
    let h = renyi_entropy(f, EntropyOrder::new(alpha)?);
    Ok(h - 0.5 * f.variance().ln() - constant)
}
