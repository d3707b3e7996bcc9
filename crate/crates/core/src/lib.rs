//! Rényi entropy bounds for one-dimensional log-concave densities: exact
//! entropies of piecewise log-linear densities, a certified enclosure of the
//! threshold order α*, exact series certificates, and sweeps that check the
//! bounds and their entropy power consequences.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod certificates;
pub mod convolution;
pub mod density;
pub mod entropy;
pub mod epi;
pub mod error;
pub mod gfunction;
pub mod interval;
pub mod report;
pub mod series;
pub mod special;
pub mod sweeps;

pub use density::{NamedDensity, PiecewiseLogLinearDensity};
pub use entropy::{entropy_power, renyi_entropy, EntropyOrder};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub mod overview {}
    #[doc = include_str!("../../../book/src/densities.md")]
    pub mod densities {}
    #[doc = include_str!("../../../book/src/threshold.md")]
    pub mod threshold {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    pub mod certificates {}
    #[doc = include_str!("../../../book/src/convolution.md")]
    pub mod convolution {}
    #[doc = include_str!("../../../book/src/relative.md")]
    pub mod relative {}
}
