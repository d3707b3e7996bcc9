//! Closed-form integrals over one segment of a piecewise log-linear density.
//!
//! On a segment the potential is affine, so every integral reduces to
//! `U_k(z) = ∫_0^1 u^k e^{-z u} du` after anchoring at the endpoint where the
//! potential is smallest (then `z >= 0` and nothing overflows).

/// `∫_0^1 u^k e^{-z u} du` for `z >= 0` and `k <= 2`.
pub fn unit_moment(k: u32, z: f64) -> f64 {
    debug_assert!(z >= 0.0 && k <= 2);
    if z < 0.5 {
        // sum_n (-z)^n / (n! (n + k + 1)); 24 terms reach 1e-25 at z = 0.5
        let mut term = 1.0;
        let mut acc = 0.0;
        for n in 0..24u32 {
            acc += term / f64::from(n + k + 1);
            term *= -z / f64::from(n + 1);
        }
        return acc;
    }
    let e = (-z).exp();
    match k {
        0 => -(-z).exp_m1() / z,
        1 => (1.0 - e * (1.0 + z)) / (z * z),
        _ => (2.0 - e * (2.0 + 2.0 * z + z * z)) / (z * z * z),
    }
}

/// `(1 - e^{-x}) / x` with the `x -> 0` limit 1.
pub fn one_minus_exp_over(x: f64) -> f64 {
    unit_moment(0, x)
}

/// A segment `[x0, x1]` with potential values `v0`, `v1` at its ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub v0: f64,
    pub v1: f64,
}

/// Segment re-anchored at its minimal-potential endpoint.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Anchored {
    /// abscissa of the minimal-potential end
    pub start: f64,
    /// +1 if the segment runs to the right of `start`, -1 otherwise
    pub dir: f64,
    pub width: f64,
    pub vmin: f64,
    /// total potential rise across the segment (>= 0)
    pub rise: f64,
}

impl Segment {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn slope(&self) -> f64 {
        (self.v1 - self.v0) / (self.x1 - self.x0)
    }

    pub fn potential_at(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.width();
        self.v0 + t * (self.v1 - self.v0)
    }

    pub(crate) fn anchored(&self) -> Anchored {
        if self.v1 >= self.v0 {
            Anchored {
                start: self.x0,
                dir: 1.0,
                width: self.width(),
                vmin: self.v0,
                rise: self.v1 - self.v0,
            }
        } else {
            Anchored {
                start: self.x1,
                dir: -1.0,
                width: self.width(),
                vmin: self.v1,
                rise: self.v0 - self.v1,
            }
        }
    }

    /// `log ∫ e^{-p V}` over the segment.
    pub fn log_power_mass(&self, p: f64) -> f64 {
        let a = self.anchored();
        -p * a.vmin + (a.width * unit_moment(0, p * a.rise)).ln()
    }

    /// `∫ (x - c)^k e^{-V}` over the segment, `k <= 2`.
    pub fn central_moment(&self, k: u32, c: f64) -> f64 {
        let a = self.anchored();
        let z = a.rise;
        let scale = (-a.vmin).exp() * a.width;
        let d = a.start - c;
        let sw = a.dir * a.width;
        match k {
            0 => scale * unit_moment(0, z),
            1 => scale * (d * unit_moment(0, z) + sw * unit_moment(1, z)),
            _ => {
                scale
                    * (d * d * unit_moment(0, z)
                        + 2.0 * d * sw * unit_moment(1, z)
                        + sw * sw * unit_moment(2, z))
            }
        }
    }

    /// `∫ V e^{-V}` over the segment, the Shannon-entropy contribution.
    pub fn shannon_part(&self) -> f64 {
        let a = self.anchored();
        let z = a.rise;
        (-a.vmin).exp() * a.width * (a.vmin * unit_moment(0, z) + z * unit_moment(1, z))
    }

    /// `∫_lo^hi e^{-V}` for `x0 <= lo <= hi <= x1`.
    pub fn partial_mass(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let piece = Segment {
            x0: lo,
            x1: hi,
            v0: self.potential_at(lo),
            v1: self.potential_at(hi),
        };
        piece.central_moment(0, 0.0)
    }
}
