//! One-dimensional log-concave densities.
//!
//! The working representation is [`PiecewiseLogLinearDensity`]: a density
//! `f = e^{-V}` on a bounded interval whose potential `V` is convex and
//! piecewise linear. Every moment, `L^p` mass and entropy of such a density
//! has an elementary closed form per segment, so nothing here integrates on a
//! grid. Symbolic families with known formulas live in [`NamedDensity`].

mod named;
mod sample;
pub mod segment;

pub use named::{DensitySpec, NamedDensity, PiecewiseOptions, DEFAULT_TRUNCATION_MASS};
pub use sample::{sample_logconcave, SampleConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use segment::Segment;

/// Admissible deviation of `∫ f` from 1 after construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

const CONVEXITY_SLACK: f64 = 1e-9;
const TIE_SLACK: f64 = 1e-12;
const MIRROR_SLACK: f64 = 1e-12;

/// A normalized log-concave density with convex piecewise-linear potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLogLinearDensity {
    knots: Vec<f64>,
    potential: Vec<f64>,
    symmetric: bool,
}

impl PiecewiseLogLinearDensity {
    /// Builds a density from knots and (unnormalized) potential values.
    ///
    /// The potential is shifted so that the density integrates to one, equal
    /// consecutive slopes are merged, and the symmetry flag is detected from
    /// the data.
    pub fn new(knots: Vec<f64>, potential: Vec<f64>) -> Result<Self> {
        let symmetric = is_mirror(&knots, &potential);
        Self::build(knots, potential, symmetric)
    }

    /// Builds a symmetric density from its right half.
    ///
    /// `half_knots` must start at 0; the left half is the exact mirror image.
    pub fn from_half(half_knots: &[f64], half_potential: &[f64]) -> Result<Self> {
        if half_knots.len() != half_potential.len() || half_knots.len() < 2 {
            return Err(Error::InvalidDensity(
                "half representation needs matching knots and potential, at least two".into(),
            ));
        }
        if half_knots[0] != 0.0 {
            return Err(Error::InvalidDensity(
                "half representation must start at 0".into(),
            ));
        }
        let m = half_knots.len();
        let mut knots = Vec::with_capacity(2 * m - 1);
        let mut potential = Vec::with_capacity(2 * m - 1);
        for i in (1..m).rev() {
            knots.push(-half_knots[i]);
            potential.push(half_potential[i]);
        }
        knots.extend_from_slice(half_knots);
        potential.extend_from_slice(half_potential);
        Self::build(knots, potential, true)
    }

    fn build(knots: Vec<f64>, potential: Vec<f64>, symmetric: bool) -> Result<Self> {
        validate_shape(&knots, &potential)?;
        let (knots, mut potential) = merge_ties(knots, potential)?;
        let log_mass = log_sum_exp(segments_of(&knots, &potential).map(|s| s.log_power_mass(1.0)));
        if !log_mass.is_finite() {
            return Err(Error::InvalidDensity(
                "density has zero or infinite mass".into(),
            ));
        }
        for v in &mut potential {
            *v += log_mass;
        }
        let d = Self {
            knots,
            potential,
            symmetric,
        };
        debug_assert!((d.mass() - 1.0).abs() <= NORMALIZATION_TOLERANCE);
        Ok(d)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Potential `V(x_i) = -log f(x_i)` at each knot.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn support_length(&self) -> f64 {
        let (a, b) = self.support();
        b - a
    }

    pub fn num_segments(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        segments_of(&self.knots, &self.potential)
    }

    /// Slopes of the potential, one per segment; nondecreasing.
    pub fn slopes(&self) -> Vec<f64> {
        self.segments().map(|s| s.slope()).collect()
    }

    /// `V(x)`, or `+inf` outside the support.
    pub fn potential_at(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if !(a..=b).contains(&x) {
            return f64::INFINITY;
        }
        let i = match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            i => (i - 1).min(self.num_segments() - 1),
        };
        Segment {
            x0: self.knots[i],
            x1: self.knots[i + 1],
            v0: self.potential[i],
            v1: self.potential[i + 1],
        }
        .potential_at(x)
    }

    pub fn pdf_at(&self, x: f64) -> f64 {
        (-self.potential_at(x)).exp()
    }

    /// `sup f`, attained at a knot.
    pub fn max_density(&self) -> f64 {
        (-self.min_potential()).exp()
    }

    pub fn min_potential(&self) -> f64 {
        self.potential.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Total mass; 1 up to [`NORMALIZATION_TOLERANCE`].
    pub fn mass(&self) -> f64 {
        self.segments().map(|s| s.central_moment(0, 0.0)).sum()
    }

    /// Raw moment `∫ x^k f`, `k ∈ {0, 1, 2}`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k > 2 {
            return Err(Error::InvalidParameter(format!(
                "moment order {k} not in {{0,1,2}}"
            )));
        }
        Ok(self.segments().map(|s| s.central_moment(k, 0.0)).sum())
    }

    pub fn mean(&self) -> f64 {
        if self.symmetric {
            return 0.0;
        }
        self.segments().map(|s| s.central_moment(1, 0.0)).sum()
    }

    /// Variance, accumulated about the mean to avoid cancellation.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.segments().map(|s| s.central_moment(2, m)).sum()
    }

    /// `log ∫ f^p`, summed in log space.
    pub fn log_lp_mass(&self, p: f64) -> f64 {
        log_sum_exp(self.segments().map(|s| s.log_power_mass(p)))
    }

    /// `∫ f^p` in closed form.
    pub fn lp_mass(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lp_mass needs p > 0, got {p}"
            )));
        }
        Ok(self.log_lp_mass(p).exp())
    }

    /// `∫ f^p` over `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let mut total = 0.0;
        for s in self.segments() {
            let a = lo.max(s.x0);
            let b = hi.min(s.x1);
            if b > a {
                total += s.partial_mass(a, b);
            }
        }
        total
    }

    /// `f_λ(x) = λ f(λ x)`. Divides the variance by `λ²`.
    pub fn rescale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rescale factor must be positive, got {lambda}"
            )));
        }
        let shift = lambda.ln();
        Ok(Self {
            knots: self.knots.iter().map(|x| x / lambda).collect(),
            potential: self.potential.iter().map(|v| v - shift).collect(),
            symmetric: self.symmetric,
        })
    }

    /// Density of `-X`.
    pub fn reflect(&self) -> Self {
        Self {
            knots: self.knots.iter().rev().map(|x| -x).collect(),
            potential: self.potential.iter().rev().copied().collect(),
            symmetric: self.symmetric,
        }
    }

    /// Density of `X + t`.
    pub fn shift(&self, t: f64) -> Self {
        Self {
            knots: self.knots.iter().map(|x| x + t).collect(),
            potential: self.potential.clone(),
            symmetric: self.symmetric && t == 0.0,
        }
    }
}

fn segments_of<'a>(knots: &'a [f64], potential: &'a [f64]) -> impl Iterator<Item = Segment> + 'a {
    knots
        .windows(2)
        .zip(potential.windows(2))
        .map(|(x, v)| Segment {
            x0: x[0],
            x1: x[1],
            v0: v[0],
            v1: v[1],
        })
}

pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn validate_shape(knots: &[f64], potential: &[f64]) -> Result<()> {
    if knots.len() != potential.len() {
        return Err(Error::InvalidDensity(format!(
            "{} knots but {} potential values",
            knots.len(),
            potential.len()
        )));
    }
    if knots.len() < 2 {
        return Err(Error::InvalidDensity("need at least two knots".into()));
    }
    if knots.iter().chain(potential).any(|v| !v.is_finite()) {
        return Err(Error::InvalidDensity(
            "knots and potential must be finite".into(),
        ));
    }
    if knots.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidDensity(
            "knots must be strictly increasing".into(),
        ));
    }
    let slopes: Vec<f64> = segments_of(knots, potential).map(|s| s.slope()).collect();
    for (i, w) in slopes.windows(2).enumerate() {
        let tol = CONVEXITY_SLACK * (1.0 + w[0].abs() + w[1].abs());
        if w[1] < w[0] - tol {
            return Err(Error::NotLogConcave {
                index: i + 1,
                left: w[0],
                right: w[1],
            });
        }
    }
    Ok(())
}

/// Drops interior knots where the slope does not change.
fn merge_ties(knots: Vec<f64>, potential: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut out_k = vec![knots[0]];
    let mut out_v = vec![potential[0]];
    for i in 1..knots.len() - 1 {
        let left = (potential[i] - out_v[out_v.len() - 1]) / (knots[i] - out_k[out_k.len() - 1]);
        let right = (potential[i + 1] - potential[i]) / (knots[i + 1] - knots[i]);
        if (right - left).abs() > TIE_SLACK * (1.0 + left.abs() + right.abs()) {
            out_k.push(knots[i]);
            out_v.push(potential[i]);
        }
    }
    out_k.push(knots[knots.len() - 1]);
    out_v.push(potential[potential.len() - 1]);
    Ok((out_k, out_v))
}

fn is_mirror(knots: &[f64], potential: &[f64]) -> bool {
    let n = knots.len();
    if n != potential.len() {
        return false;
    }
    let scale = knots.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let vscale = potential
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    (0..n).all(|i| {
        (knots[i] + knots[n - 1 - i]).abs() <= MIRROR_SLACK * scale
            && (potential[i] - potential[n - 1 - i]).abs() <= MIRROR_SLACK * vscale
    })
}
