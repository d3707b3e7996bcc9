//! Intervals with exact rational endpoints.
//!
//! Every operation returns an interval that contains all values the exact
//! operation can take on the inputs, so a sign read off the result is a
//! proof of the sign of the true value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(invalid(format!(
                "interval endpoints out of order: {lo} > {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(q: BigRational) -> Self {
        Self {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::point(BigRational::from_integer(n.into()))
    }

    /// `[p/q, p/q]`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::point(BigRational::new(p.into(), q.into()))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Definite sign of every element, or `None` when the interval straddles
    /// or touches zero without being `[0, 0]`.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    /// Interval of `x^n`; even powers of an interval containing 0 start at 0.
    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            return Self::point(BigRational::one());
        }
        let a = pow_q(&self.lo, n);
        let b = pow_q(&self.hi, n);
        if n % 2 == 1 || !self.lo.is_negative() {
            Self { lo: a, hi: b }
        } else if !self.hi.is_positive() {
            Self { lo: b, hi: a }
        } else {
            Self {
                lo: BigRational::zero(),
                hi: a.max(b),
            }
        }
    }

    /// `1/x`; the interval must exclude 0.
    pub fn recip(&self) -> Result<Self> {
        if self.sign().is_none() || self.lo.is_zero() || self.hi.is_zero() {
            return Err(invalid("reciprocal of an interval containing 0"));
        }
        Ok(Self {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_negative() {
            Self {
                lo: &self.hi * q,
                hi: &self.lo * q,
            }
        } else {
            Self {
                lo: &self.lo * q,
                hi: &self.hi * q,
            }
        }
    }

    /// Widens both endpoints to multiples of `2^{-bits}`, bounding the size
    /// of the representation.
    pub fn round_outward(&self, bits: u32) -> Self {
        let scaled = |q: &BigRational| (q.numer() << bits as usize, q.denom().clone());
        let (ln, ld) = scaled(&self.lo);
        let (hn, hd) = scaled(&self.hi);
        let lo = ln.div_floor(&ld);
        let hi = -((-hn).div_floor(&hd));
        let den = BigInt::one() << bits as usize;
        Self {
            lo: BigRational::new(lo, den.clone()),
            hi: BigRational::new(hi, den),
        }
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::NAN)
    }
}

fn pow_q(q: &BigRational, n: u32) -> BigRational {
    BigRational::new_raw(q.numer().pow(n), q.denom().pow(n))
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Serialized as `{"lo": "p/q", "hi": "p/q"}`.
impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RationalInterval", 2)?;
        st.serialize_field("lo", &rational_string(&self.lo))?;
        st.serialize_field("hi", &rational_string(&self.hi))?;
        st.end()
    }
}

/// `p/q` in lowest terms (`p/1` for integers).
pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses a decimal (`0.001`, `1e-30`, `-2.5E3`) or fraction (`3/8`) to the
/// rational it denotes exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || invalid(format!("cannot parse '{s}' as an exact rational"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let n: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| bad())?
    };
    let shift = exponent - frac_part.len() as i64;
    if shift.unsigned_abs() > 1_000_000 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    let mut q = if shift >= 0 {
        BigRational::from_integer(n * ten.pow(shift as u32))
    } else {
        BigRational::new(n, ten.pow((-shift) as u32))
    };
    if negative {
        q = -q;
    }
    Ok(q)
}

/// Decimal expansion of `q` truncated toward zero after `digits` fractional digits.
pub fn decimal_string(q: &BigRational, digits: usize) -> String {
    let scaled = q.abs() * BigRational::from_integer(BigInt::from(10).pow(digits as u32));
    let n = scaled.to_integer().to_string();
    let n = format!("{n:0>width$}", width = digits + 1);
    let (int_part, frac_part) = n.split_at(n.len() - digits);
    let sign = if q.is_negative() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Closest `f64` is not needed for certificates; this is for display only.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| invalid(format!("{x} is not finite")))
}

/// Number of bits in the larger of numerator and denominator.
pub fn bit_size(q: &BigRational) -> u64 {
    q.numer().bits().max(q.denom().bits())
}

impl Add for &RationalInterval {
    type Output = RationalInterval;
    fn add(self, o: &RationalInterval) -> RationalInterval {
        RationalInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &RationalInterval {
    type Output = RationalInterval;
    fn sub(self, o: &RationalInterval) -> RationalInterval {
        RationalInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Neg for &RationalInterval {
    type Output = RationalInterval;
    fn neg(self) -> RationalInterval {
        RationalInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Mul for &RationalInterval {
    type Output = RationalInterval;
    fn mul(self, o: &RationalInterval) -> RationalInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().expect("four products").clone();
        let hi = c.iter().max().expect("four products").clone();
        RationalInterval { lo, hi }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalInterval {
            type Output = RationalInterval;
            fn $m(self, o: RationalInterval) -> RationalInterval {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
