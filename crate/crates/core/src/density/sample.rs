use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PiecewiseLogLinearDensity;
use crate::error::{invalid, Result};

/// Shape of the random densities drawn by [`sample_logconcave`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub symmetric: bool,
    /// Upper bound on the number of knots of the (half) potential, at least 2.
    pub max_knots: usize,
    /// Length of the interval the (half) knots are drawn from.
    pub support_scale: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            symmetric: true,
            max_knots: 8,
            support_scale: 1.0,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_knots < 2 {
            return Err(invalid(format!(
                "max_knots must be at least 2, got {}",
                self.max_knots
            )));
        }
        if !(self.support_scale > 0.0 && self.support_scale.is_finite()) {
            return Err(invalid(format!(
                "support_scale must be positive, got {}",
                self.support_scale
            )));
        }
        Ok(())
    }
}

/// Draws a random log-concave density, deterministically in `seed`.
///
/// The potential is convex and piecewise linear on `[0, support_scale]`:
/// knots are sorted uniform draws and the slopes are cumulative sums of
/// nonnegative increments, a fraction of them exactly zero so flat runs
/// (near-uniform shapes) and single kinks (near-exponential shapes) both
/// occur. In the symmetric case the slopes start at 0 and the half-density is
/// mirrored about the origin; otherwise the first slope may be negative.
pub fn sample_logconcave(seed: u64, config: &SampleConfig) -> Result<PiecewiseLogLinearDensity> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = config.support_scale;
    let n = rng.gen_range(2..=config.max_knots);

    let mut knots: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(0.0..s)).collect();
    knots.push(0.0);
    knots.push(s);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    // typical total slope variation, log-uniform between 0.1/s and 30/s
    let spread = (rng.gen_range((0.1f64).ln()..(30f64).ln())).exp() / s;
    let mut slope = if config.symmetric {
        0.0
    } else {
        -spread * rng.gen::<f64>()
    };
    let mut potential = vec![0.0];
    for w in knots.windows(2) {
        if rng.gen_bool(0.7) {
            slope += spread * -(1.0 - rng.gen::<f64>()).ln() / (knots.len() - 1) as f64;
        }
        let last = potential[potential.len() - 1];
        potential.push(last + slope * (w[1] - w[0]));
    }

    if config.symmetric {
        PiecewiseLogLinearDensity::from_half(&knots, &potential)
    } else {
        PiecewiseLogLinearDensity::new(knots, potential)
    }
}
