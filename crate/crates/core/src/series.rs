//! Exact power series in `b` whose coefficients are polynomials in α.
//!
//! The boundary inequalities reduce to sign patterns of Taylor coefficients
//! of exponential polynomials such as `(e^b - 1)(e^{αb} - 1)`. Keeping α
//! symbolic makes exact zeros checkable as polynomial identities; signs are
//! then read off an outward-exact evaluation on a rational enclosure of α.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::interval::RationalInterval;

/// `Σ qₖ αᵏ` with exact rational coefficients; trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlphaPolynomial {
    coeffs: Vec<BigRational>,
}

impl AlphaPolynomial {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// The monomial `α`.
    pub fn alpha() -> Self {
        Self::from_integers(&[0, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * q).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Outward-exact range over `x`.
    ///
    /// For `x > 0` the polynomial is split into its positive and negative
    /// parts, each monotone, and evaluated exactly at the endpoints; otherwise
    /// interval Horner is used.
    pub fn eval_interval(&self, x: &RationalInterval) -> RationalInterval {
        if self.is_zero() {
            return RationalInterval::from_integer(0);
        }
        if !x.lo().is_positive() {
            let mut acc = RationalInterval::from_integer(0);
            for c in self.coeffs.iter().rev() {
                acc = &(&acc * x) + &RationalInterval::point(c.clone());
            }
            return acc;
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let pos: Vec<BigInt> = ints
            .iter()
            .map(|c| {
                if c.is_positive() {
                    c.clone()
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        let neg: Vec<BigInt> = ints
            .iter()
            .map(|c| if c.is_negative() { -c } else { BigInt::zero() })
            .collect();
        let lo = eval_int_poly(&pos, x.lo()) - eval_int_poly(&neg, x.hi());
        let hi = eval_int_poly(&pos, x.hi()) - eval_int_poly(&neg, x.lo());
        let den = BigRational::from_integer(lcm);
        RationalInterval::new(lo / &den, hi / den).expect("monotone parts give ordered endpoints")
    }
}

/// Exact value of an integer polynomial at a rational, by homogeneous Horner.
fn eval_int_poly(c: &[BigInt], x: &BigRational) -> BigRational {
    let Some(d) = c.len().checked_sub(1) else {
        return BigRational::zero();
    };
    let (num, den) = (x.numer(), x.denom());
    let mut s = c[d].clone();
    let mut dpow = BigInt::one();
    for i in (0..d).rev() {
        dpow *= den;
        s = s * num + &c[i] * &dpow;
    }
    BigRational::new(s, den.pow(d as u32))
}

impl fmt::Display for AlphaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})α")?,
                _ => write!(f, "({c})α^{k}")?,
            }
        }
        Ok(())
    }
}

/// Truncated power series in `b`; entry `n` is the coefficient of `bⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSeries {
    coeffs: Vec<AlphaPolynomial>,
}

impl AlphaSeries {
    /// Series through order `order` from explicit coefficients; missing
    /// entries are zero.
    pub fn new(order: usize, mut coeffs: Vec<AlphaPolynomial>) -> Self {
        coeffs.resize(order + 1, AlphaPolynomial::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(order, Vec::new())
    }

    /// `e^{(u + vα) b}` through `order`.
    pub fn exp(u: i64, v: i64, order: usize) -> Self {
        let lambda = AlphaPolynomial::from_integers(&[u, v]);
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut pw = AlphaPolynomial::from_integers(&[1]);
        for n in 0..=order {
            if n > 0 {
                pw = pw
                    .mul(&lambda)
                    .scale(&BigRational::new(1.into(), (n as i64).into()));
            }
            coeffs.push(pw.clone());
        }
        Self { coeffs }
    }

    /// A polynomial in `b` with α-independent coefficients.
    pub fn polynomial(order: usize, coeffs: &[i64]) -> Self {
        Self::new(
            order,
            coeffs
                .iter()
                .map(|&c| AlphaPolynomial::from_integers(&[c]))
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, n: usize) -> &AlphaPolynomial {
        &self.coeffs[n]
    }

    pub fn coefficients(&self) -> &[AlphaPolynomial] {
        &self.coeffs
    }

    fn check_order(&self, o: &Self) -> Result<()> {
        if self.order() != o.order() {
            return Err(invalid(format!(
                "series orders differ: {} vs {}",
                self.order(),
                o.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    /// Multiplies every coefficient by a polynomial in α.
    pub fn scale(&self, p: &AlphaPolynomial) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.mul(p)).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        let n = self.order();
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k).fold(AlphaPolynomial::zero(), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&o.coeffs[k - i]))
                })
            })
            .collect();
        Ok(Self { coeffs })
    }

    /// Sum of the series at `(α, b)` in floating point.
    pub fn eval_f64(&self, alpha: f64, b: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * b + c.eval_f64(alpha))
    }
}

/// Finite sum of terms `c(α) bᵏ e^{(u + vα) b}`.
///
/// Products of exponentials stay exponentials, so Taylor coefficients of
/// any order come from one binomial expansion per distinct rate instead of
/// a truncated series product.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly {
    // (b power, u, v) -> coefficient
    terms: BTreeMap<(u32, i64, i64), AlphaPolynomial>,
}

/// Order and integer coefficients of one term grouped by exponential rate.
type Term = (usize, Vec<BigInt>);

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(c: AlphaPolynomial, b_power: u32, u: i64, v: i64) -> Self {
        let mut e = Self::zero();
        e.push(c, b_power, u, v);
        e
    }

    /// `e^{(u + vα) b}`.
    pub fn exp(u: i64, v: i64) -> Self {
        Self::term(AlphaPolynomial::from_integers(&[1]), 0, u, v)
    }

    /// `c(α)`.
    pub fn constant(c: AlphaPolynomial) -> Self {
        Self::term(c, 0, 0, 0)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(AlphaPolynomial::from_integers(&[c]))
    }

    /// `bᵏ`.
    pub fn b_pow(k: u32) -> Self {
        Self::term(AlphaPolynomial::from_integers(&[1]), k, 0, 0)
    }

    fn push(&mut self, c: AlphaPolynomial, k: u32, u: i64, v: i64) {
        let slot = self.terms.entry((k, u, v)).or_default();
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.terms.remove(&(k, u, v));
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&(k, u, v), c) in &o.terms {
            out.push(c.clone(), k, u, v);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&AlphaPolynomial::from_integers(&[-1])))
    }

    pub fn scale(&self, p: &AlphaPolynomial) -> Self {
        let mut out = Self::zero();
        for (&(k, u, v), c) in &self.terms {
            out.push(c.mul(p), k, u, v);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (&(k1, u1, v1), c1) in &self.terms {
            for (&(k2, u2, v2), c2) in &o.terms {
                out.push(c1.mul(c2), k1 + k2, u1 + u2, v1 + v2);
            }
        }
        out
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn eval_f64(&self, alpha: f64, b: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(k, u, v), c)| {
                c.eval_f64(alpha) * b.powi(k as i32) * ((u as f64 + v as f64 * alpha) * b).exp()
            })
            .sum()
    }

    /// Taylor coefficients in `b` through `order`.
    pub fn to_series(&self, order: usize) -> AlphaSeries {
        // n!·[bⁿ] of c bᵏ e^{λb} is c λ^{n-k} n!/(n-k)!; work over the integers
        // after clearing the common denominator, one power table per rate
        let lcm = self
            .terms
            .values()
            .flat_map(|c| c.coeffs.iter())
            .fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let to_int = |c: &AlphaPolynomial| -> Vec<BigInt> {
            c.coeffs
                .iter()
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect()
        };
        let mut scaled: Vec<Vec<BigInt>> = vec![Vec::new(); order + 1];
        let mut by_rate: BTreeMap<(i64, i64), Vec<Term>> = BTreeMap::new();
        for (&(k, u, v), c) in &self.terms {
            by_rate
                .entry((u, v))
                .or_default()
                .push((k as usize, to_int(c)));
        }
        for (&(u, v), group) in &by_rate {
            let (u, v) = (BigInt::from(u), BigInt::from(v));
            let mut powers: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
            for m in 1..=order {
                let prev = &powers[m - 1];
                let mut next = vec![BigInt::zero(); prev.len() + 1];
                for (i, p) in prev.iter().enumerate() {
                    next[i] += &u * p;
                    next[i + 1] += &v * p;
                }
                powers.push(next);
            }
            for (k, c) in group {
                let k = *k;
                let mut falling = (1..=k).fold(BigInt::one(), |f, i| f * BigInt::from(i));
                for n in k..=order {
                    if n > k {
                        // n!/(n-k)! from (n-1)!/(n-1-k)!
                        falling = falling * BigInt::from(n) / BigInt::from(n - k);
                    }
                    let pw = &powers[n - k];
                    let slot = &mut scaled[n];
                    if slot.len() < pw.len() + c.len() - 1 {
                        slot.resize(pw.len() + c.len() - 1, BigInt::zero());
                    }
                    for (j, cj) in c.iter().enumerate() {
                        if cj.is_zero() {
                            continue;
                        }
                        let f = cj * &falling;
                        for (i, p) in pw.iter().enumerate() {
                            slot[i + j] += &f * p;
                        }
                    }
                }
            }
        }
        let mut denom = lcm;
        let coeffs = scaled
            .into_iter()
            .enumerate()
            .map(|(n, p)| {
                if n > 0 {
                    denom *= BigInt::from(n);
                }
                AlphaPolynomial::new(
                    p.into_iter()
                        .map(|x| BigRational::new(x, denom.clone()))
                        .collect(),
                )
            })
            .collect();
        AlphaSeries { coeffs }
    }
}

/// `2α(b²+2b-2e^b+2)(e^b-1) + (1-3α)(e^{αb}-1)(b²+2b-2e^b+2) + b²(1-α)(e^b-1)(e^{αb}-1)`,
/// the numerator of the logarithmic derivative of `G(0, b)`.
pub fn part_e_expression() -> ExpPoly {
    let a = AlphaPolynomial::alpha();
    let quad = ExpPoly::b_pow(2)
        .add(&ExpPoly::b_pow(1).scale(&c(2)))
        .sub(&ExpPoly::exp(1, 0).scale(&c(2)))
        .add(&ExpPoly::int(2));
    let e1 = ExpPoly::exp(1, 0).sub(&ExpPoly::int(1));
    let ea = ExpPoly::exp(0, 1).sub(&ExpPoly::int(1));
    let t1 = quad.mul(&e1).scale(&a.scale(&q(2)));
    let t2 = ea
        .mul(&quad)
        .scale(&AlphaPolynomial::from_integers(&[1, -3]));
    let t3 = ExpPoly::b_pow(2)
        .mul(&e1)
        .mul(&ea)
        .scale(&AlphaPolynomial::from_integers(&[1, -1]));
    t1.add(&t2).add(&t3)
}

/// The cleared-denominator form of `(log φ₁)' - (log φ₂)'` for the derivative
/// of `G` in `a` at `a = 0`.
pub fn part_d_expression() -> ExpPoly {
    let a = AlphaPolynomial::alpha();
    let e1 = ExpPoly::exp(1, 0).sub(&ExpPoly::int(1));
    let e1b = e1.sub(&ExpPoly::b_pow(1));
    let ea = ExpPoly::exp(0, 1).sub(&ExpPoly::int(1));
    let a_plus_1 = AlphaPolynomial::from_integers(&[1, 1]);
    let a_minus_1 = AlphaPolynomial::from_integers(&[-1, 1]);

    let bracket = e1
        .mul(&e1b)
        .scale(&a_plus_1.mul(&a).scale(&q(-1)))
        .add(&e1b.mul(&ea).scale(&a.scale(&q(2))))
        .sub(&ExpPoly::b_pow(1).mul(&e1).mul(&ea).scale(&a_minus_1));
    let weights = ExpPoly::exp(1, 0)
        .scale(&AlphaPolynomial::from_integers(&[1, -3]))
        .add(&ExpPoly::exp(0, 1).scale(&a.scale(&q(2))))
        .add(&ExpPoly::exp(1, 1).scale(&a_minus_1));
    let last = ExpPoly::exp(1, 0)
        .scale(&AlphaPolynomial::from_integers(&[-1, 3]))
        .sub(&ExpPoly::exp(0, 1).scale(&c(2)));
    let second = e1.mul(&e1b).mul(&ea).mul(&last).scale(&a.mul(&a_minus_1));
    bracket.mul(&weights).add(&second)
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn c(n: i64) -> AlphaPolynomial {
    AlphaPolynomial::from_integers(&[n])
}

/// Taylor coefficients of [`part_e_expression`] through `order >= 8`.
pub fn coefficients_part_e(order: usize) -> Result<AlphaSeries> {
    if order < 8 {
        return Err(invalid(format!(
            "truncation order must be at least 8, got {order}"
        )));
    }
    Ok(part_e_expression().to_series(order))
}

/// Taylor coefficients of [`part_d_expression`] through `order >= 30`.
pub fn coefficients_part_d(order: usize) -> Result<AlphaSeries> {
    if order < 30 {
        return Err(invalid(format!(
            "truncation order must be at least 30, got {order}"
        )));
    }
    Ok(part_d_expression().to_series(order))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedSign {
    /// The zero polynomial.
    Zero,
    Positive,
    Negative,
    /// Zero polynomial or certified `>= 0`.
    Nonnegative,
}

/// What an evaluation proves about one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservedSign {
    Zero,
    Positive,
    Negative,
    Nonnegative,
    Nonpositive,
    Indeterminate,
}

impl ObservedSign {
    fn satisfies(self, e: ExpectedSign) -> bool {
        use ObservedSign as O;
        match e {
            ExpectedSign::Zero => self == O::Zero,
            ExpectedSign::Positive => self == O::Positive,
            ExpectedSign::Negative => self == O::Negative,
            ExpectedSign::Nonnegative => matches!(self, O::Zero | O::Positive | O::Nonnegative),
        }
    }
}

/// Ordered, disjoint index blocks with the sign each must have.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    blocks: Vec<(usize, usize, ExpectedSign)>,
}

impl SignPattern {
    /// Blocks are inclusive `(first, last, sign)` ranges.
    pub fn new(blocks: Vec<(usize, usize, ExpectedSign)>) -> Result<Self> {
        let mut prev: Option<usize> = None;
        for &(lo, hi, _) in &blocks {
            if lo > hi || prev.is_some_and(|p| lo <= p) {
                return Err(invalid(
                    "sign pattern blocks must be nonempty, ordered and disjoint",
                ));
            }
            prev = Some(hi);
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[(usize, usize, ExpectedSign)] {
        &self.blocks
    }

    pub fn last_index(&self) -> Option<usize> {
        self.blocks.last().map(|b| b.1)
    }

    /// `{0–4: zero, 5–7: positive, 8–16: negative}`.
    pub fn part_e() -> Self {
        Self::new(vec![
            (0, 4, ExpectedSign::Zero),
            (5, 7, ExpectedSign::Positive),
            (8, 16, ExpectedSign::Negative),
        ])
        .expect("static pattern")
    }

    /// `{0–1: zero, 2–9: nonnegative, 10–29: negative}`.
    pub fn part_d() -> Self {
        Self::new(vec![
            (0, 1, ExpectedSign::Zero),
            (2, 9, ExpectedSign::Nonnegative),
            (10, 29, ExpectedSign::Negative),
        ])
        .expect("static pattern")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSign {
    pub n: usize,
    pub expected: ExpectedSign,
    pub observed: ObservedSign,
    /// The coefficient is the zero polynomial in α.
    pub zero_polynomial: bool,
    /// Enclosure of `n!` times the coefficient, rounded outward for display.
    pub scaled_interval: RationalInterval,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignCertificate {
    pub enclosure: RationalInterval,
    pub entries: Vec<CoefficientSign>,
    /// Indices whose enclosure straddles zero.
    pub indeterminate: Vec<usize>,
    pub pass: bool,
}

/// Bits kept after the binary point in displayed coefficient enclosures.
const DISPLAY_BITS: u32 = 64;

/// Certified sign of a single coefficient on an α enclosure.
pub fn coefficient_sign(
    p: &AlphaPolynomial,
    alpha: &RationalInterval,
) -> (ObservedSign, RationalInterval) {
    if p.is_zero() {
        return (ObservedSign::Zero, RationalInterval::from_integer(0));
    }
    let v = p.eval_interval(alpha);
    let s = match (
        v.lo().cmp(&BigRational::zero()),
        v.hi().cmp(&BigRational::zero()),
    ) {
        (Ordering::Greater, _) => ObservedSign::Positive,
        (_, Ordering::Less) => ObservedSign::Negative,
        (Ordering::Equal, _) => ObservedSign::Nonnegative,
        (_, Ordering::Equal) => ObservedSign::Nonpositive,
        _ => ObservedSign::Indeterminate,
    };
    (s, v)
}

/// Evaluates each patterned coefficient on `alpha` and compares with the
/// expected sign. Indeterminate entries are listed so a caller can retry
/// with a tighter enclosure.
pub fn check_sign_pattern(
    s: &AlphaSeries,
    alpha: &RationalInterval,
    pattern: &SignPattern,
) -> Result<SignCertificate> {
    if pattern.last_index().is_some_and(|l| l > s.order()) {
        return Err(invalid(format!(
            "pattern reaches past the truncation order {}",
            s.order()
        )));
    }
    let jobs: Vec<(usize, ExpectedSign)> = pattern
        .blocks()
        .iter()
        .flat_map(|&(lo, hi, e)| (lo..=hi).map(move |n| (n, e)))
        .collect();
    let entries: Vec<CoefficientSign> = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(n, expected)| {
                let p = s.coefficient(n);
                let (observed, v) = coefficient_sign(p, alpha);
                let fact = (1..=n).fold(BigInt::one(), |f, i| f * BigInt::from(i));
                let scaled = v
                    .scale(&BigRational::from_integer(fact))
                    .round_outward(DISPLAY_BITS);
                CoefficientSign {
                    n,
                    expected,
                    observed,
                    zero_polynomial: p.is_zero(),
                    scaled_interval: scaled,
                    certified: observed.satisfies(expected),
                }
            })
            .collect()
    };
    let indeterminate = entries
        .iter()
        .filter(|e| e.observed == ObservedSign::Indeterminate)
        .map(|e| e.n)
        .collect();
    let pass = entries.iter().all(|e| e.certified);
    Ok(SignCertificate {
        enclosure: alpha.clone(),
        entries,
        indeterminate,
        pass,
    })
}

/// Limits of the function whose derivative the series describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointData {
    /// `lim_{b -> 0⁺}` is nonnegative.
    pub zero_limit_nonnegative: bool,
    /// `lim_{b -> ∞}` is nonnegative.
    pub infinity_limit_nonnegative: bool,
    /// The denominators cleared to form the series have positive product, so
    /// the series has the sign of the derivative.
    pub denominators_positive: bool,
}

/// Whether a certified sign pattern plus a certified negative tail and the
/// endpoint limits imply the function is nonnegative on `(0, ∞)`.
///
/// The coefficients must be nonnegative up to some index and nonpositive
/// after it, with at least one strictly positive and one strictly negative.
/// Then the series changes sign once, the function rises then falls, and
/// nonnegative endpoint limits finish the argument.
pub fn sign_change_conclusion(
    signs: &SignCertificate,
    tail_negative: bool,
    endpoints: &EndpointData,
) -> Result<bool> {
    if let Some(e) = signs
        .entries
        .iter()
        .find(|e| e.observed == ObservedSign::Indeterminate)
    {
        return Err(Error::Inconsistent(format!(
            "coefficient {} has no certified sign",
            e.n
        )));
    }
    if !tail_negative {
        return Err(Error::Inconsistent(
            "tail coefficients are not certified negative".into(),
        ));
    }
    let mut seen_negative = false;
    let mut seen_positive = false;
    for e in &signs.entries {
        match e.observed {
            ObservedSign::Positive | ObservedSign::Nonnegative => {
                if seen_negative && e.observed == ObservedSign::Positive {
                    return Ok(false);
                }
                seen_positive |= e.observed == ObservedSign::Positive;
            }
            ObservedSign::Negative | ObservedSign::Nonpositive => seen_negative = true,
            ObservedSign::Zero | ObservedSign::Indeterminate => {}
        }
    }
    Ok(seen_positive
        && endpoints.denominators_positive
        && endpoints.zero_limit_nonnegative
        && endpoints.infinity_limit_nonnegative)
}
