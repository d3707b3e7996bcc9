//! Seeded falsification sweeps over sampled log-concave densities.
//!
//! Every case is generated from `(seed, index)` alone and results are
//! recorded in index order, so a report is reproducible from its config.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::{alpha_star_f64, min_entropy_constant, theorem_slack, Regime};
use crate::convolution::GridConfig;
use crate::density::{
    sample_logconcave, NamedDensity, PiecewiseLogLinearDensity, PiecewiseOptions, SampleConfig,
};
use crate::entropy::{entropy_power, lp_mass_convexity_probe, renyi_entropy, EntropyOrder};
use crate::epi::{
    difference_entropy_checks, matched_generalized_gaussian, relative_alpha_entropy,
    relative_bound_constant, relative_check_with, reverse_epi_checks, sandwich_constants,
};
use crate::error::{invalid, Result};
use crate::report::{ReportBuilder, VerificationReport};
use crate::special::log_ratio;

/// Seed of case `index` in a run started from `seed`.
pub fn case_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index)
}

/// How sampled densities are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub seed: u64,
    pub samples: usize,
    pub max_knots: usize,
    pub support_scale: f64,
}

impl Sampling {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self {
            seed,
            samples,
            max_knots: 8,
            support_scale: 1.0,
        }
    }

    fn config(&self, symmetric: bool) -> SampleConfig {
        SampleConfig {
            symmetric,
            max_knots: self.max_knots,
            support_scale: self.support_scale,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(invalid("sample count must be positive"));
        }
        self.config(true).validate()
    }

    /// Density `index`, with the seed that reproduces it.
    pub fn draw(&self, index: usize, symmetric: bool) -> Result<(u64, PiecewiseLogLinearDensity)> {
        let s = case_seed(self.seed, index as u64);
        Ok((s, sample_logconcave(s, &self.config(symmetric))?))
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(invalid("no α values given"));
    }
    for &a in alphas {
        EntropyOrder::new(a)?;
    }
    Ok(())
}

/// Configuration of [`verify_theorem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremSweep {
    pub regime: Regime,
    pub alphas: Vec<f64>,
    pub sampling: Sampling,
    pub tolerance: f64,
    /// Bound on `|slack|` for the extremizers.
    pub equality_tolerance: f64,
}

impl TheoremSweep {
    /// Orders `0.5, 1, 1.2, α*∓0.01, 1.5, 2, 5, 50` over symmetric samples.
    pub fn symmetric(seed: u64, samples: usize) -> Self {
        let s = alpha_star_f64();
        Self {
            regime: Regime::Symmetric,
            alphas: vec![0.5, 1.0, 1.2, s - 0.01, s + 0.01, 1.5, 2.0, 5.0, 50.0],
            sampling: Sampling::new(seed, samples),
            tolerance: 1e-8,
            equality_tolerance: 1e-9,
        }
    }

    /// Orders `2, 3, 10` over non-symmetric samples.
    pub fn general(seed: u64, samples: usize) -> Self {
        Self {
            regime: Regime::General,
            alphas: vec![2.0, 3.0, 10.0],
            ..Self::symmetric(seed, samples)
        }
    }
}

/// `h_α ≥ ½ log var + c(α)` over sampled densities, plus the equality cases.
pub fn verify_theorem(cfg: &TheoremSweep) -> Result<VerificationReport> {
    let start = Instant::now();
    cfg.sampling.validate()?;
    check_alphas(&cfg.alphas)?;
    let symmetric = cfg.regime == Regime::Symmetric;
    let rows = (0..cfg.sampling.samples)
        .into_par_iter()
        .map(|i| {
            let (seed, f) = cfg.sampling.draw(i, symmetric)?;
            let slacks = cfg
                .alphas
                .iter()
                .map(|&a| theorem_slack(&f, a, cfg.regime))
                .collect::<Result<Vec<_>>>()?;
            Ok((seed, slacks))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rb = ReportBuilder::new(
        "verify-theorem",
        serde_json::to_value(cfg).expect("serializable config"),
    );
    let main = rb.check(
        "theorem_slack",
        "h_α(X) - ½ log var(X) - c(α) ≥ 0",
        cfg.tolerance,
    );
    for (i, (seed, slacks)) in rows.iter().enumerate() {
        for (&a, &s) in cfg.alphas.iter().zip(slacks) {
            rb.record(main, json!({ "sample": i, "seed": seed, "alpha": a }), s, s);
        }
    }

    let eq = rb.check(
        "equality_cases",
        "the extremizer has zero slack",
        cfg.equality_tolerance,
    );
    let opts = PiecewiseOptions::default();
    let s = alpha_star_f64();
    for &a in &cfg.alphas {
        let (name, d) = match cfg.regime {
            Regime::Symmetric if a <= s => ("uniform", NamedDensity::Uniform { halfwidth: 1.0 }),
            Regime::Symmetric => (
                "two_sided_exp",
                NamedDensity::TwoSidedExponential { rate: 1.0 },
            ),
            Regime::General => (
                "one_sided_exp",
                NamedDensity::OneSidedExponential { rate: 1.0 },
            ),
        };
        let slack = theorem_slack(&d.to_piecewise(&opts)?, a, cfg.regime)?;
        rb.record(
            eq,
            json!({ "density": name, "alpha": a }),
            slack,
            -slack.abs(),
        );
    }
    Ok(rb.finish(elapsed_ms(start)))
}

/// Configuration of [`verify_monotonicity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicitySweep {
    /// Strictly increasing orders; every pair is compared.
    pub alphas: Vec<f64>,
    pub sampling: Sampling,
    pub lower_tolerance: f64,
    pub upper_tolerance: f64,
}

impl MonotonicitySweep {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self {
            alphas: vec![0.3, 0.7, 1.0, 1.5, 2.0, 4.0, 16.0],
            sampling: Sampling::new(seed, samples),
            lower_tolerance: 1e-9,
            upper_tolerance: 1e-8,
        }
    }
}

/// For `p > q`: `0 ≤ h_q - h_p ≤ log q/(q-1) - log p/(p-1)`, and the
/// log-convexity of `p ↦ ∫f^p` and log-concavity of `p ↦ p ∫f^p`.
///
/// Even samples are symmetric, odd samples are not.
pub fn verify_monotonicity(cfg: &MonotonicitySweep) -> Result<VerificationReport> {
    let start = Instant::now();
    cfg.sampling.validate()?;
    check_alphas(&cfg.alphas)?;
    if cfg.alphas.windows(2).any(|w| w[1] <= w[0])
        || cfg.alphas.iter().any(|a| a.is_infinite() || *a == 0.0)
    {
        return Err(invalid(
            "monotonicity orders must be finite, positive and strictly increasing",
        ));
    }
    let rows = (0..cfg.sampling.samples)
        .into_par_iter()
        .map(|i| {
            let (seed, f) = cfg.sampling.draw(i, i % 2 == 0)?;
            let h = cfg
                .alphas
                .iter()
                .map(|&a| Ok(renyi_entropy(&f, EntropyOrder::new(a)?)))
                .collect::<Result<Vec<_>>>()?;
            let probe = lp_mass_convexity_probe(&f, &cfg.alphas)?;
            Ok((
                seed,
                h,
                probe.log_mass_convexity(),
                probe.p_mass_concavity(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rb = ReportBuilder::new("sweep", json!({ "kind": "monotonicity", "config": cfg }));
    let lower = rb.check(
        "entropy_nonincreasing",
        "h_q - h_p ≥ 0 for p > q",
        cfg.lower_tolerance,
    );
    let upper = rb.check(
        "corrected_entropy_nondecreasing",
        "h_q - h_p ≤ log q/(q-1) - log p/(p-1) for p > q",
        cfg.upper_tolerance,
    );
    let convex = rb.check(
        "lp_mass_log_convex",
        "p ↦ log ∫f^p has nonnegative second differences",
        cfg.lower_tolerance,
    );
    let concave = rb.check(
        "p_lp_mass_log_concave",
        "p ↦ log(p ∫f^p) has nonpositive second differences",
        cfg.lower_tolerance,
    );
    let n = cfg.alphas.len();
    for (i, (seed, h, cx, cc)) in rows.iter().enumerate() {
        for qi in 0..n {
            for pi in qi + 1..n {
                let (q, p) = (cfg.alphas[qi], cfg.alphas[pi]);
                let input = json!({ "sample": i, "seed": seed, "q": q, "p": p });
                let drop = h[qi] - h[pi];
                rb.record(lower, input.clone(), drop, drop);
                rb.record(upper, input, drop, log_ratio(q) - log_ratio(p) - drop);
            }
        }
        rb.record(convex, json!({ "sample": i, "seed": seed }), *cx, *cx);
        rb.record(concave, json!({ "sample": i, "seed": seed }), *cc, *cc);
    }
    Ok(rb.finish(elapsed_ms(start)))
}

/// Configuration of [`verify_sandwich`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichSweep {
    pub symmetric_alphas: Vec<f64>,
    pub general_alphas: Vec<f64>,
    pub sampling: Sampling,
    /// Relative tolerance on both sides.
    pub tolerance: f64,
    pub lower_equality_tolerance: f64,
    pub upper_equality_tolerance: f64,
    /// Segments of the generalized Gaussian used for the upper equality case.
    pub resolution: usize,
}

impl SandwichSweep {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self {
            symmetric_alphas: vec![1.1, alpha_star_f64(), 1.5, 2.0, 5.0],
            general_alphas: vec![2.0, 3.0],
            sampling: Sampling::new(seed, samples),
            tolerance: 1e-6,
            lower_equality_tolerance: 1e-9,
            upper_equality_tolerance: 1e-4,
            resolution: 10_000,
        }
    }
}

/// `C₋ var ≤ N_α ≤ C₊ var` (symmetric) and `½C₋ var ≤ N_α ≤ C₊ var` (general).
pub fn verify_sandwich(cfg: &SandwichSweep) -> Result<VerificationReport> {
    let start = Instant::now();
    cfg.sampling.validate()?;
    for &a in cfg.symmetric_alphas.iter().chain(&cfg.general_alphas) {
        sandwich_constants(a)?;
    }
    let ratios = |alphas: &[f64], symmetric: bool| {
        (0..cfg.sampling.samples)
            .into_par_iter()
            .map(|i| {
                let (seed, f) = cfg.sampling.draw(i, symmetric)?;
                let v = f.variance();
                let r = alphas
                    .iter()
                    .map(|&a| Ok(entropy_power(&f, EntropyOrder::new(a)?) / v))
                    .collect::<Result<Vec<_>>>()?;
                Ok((seed, r))
            })
            .collect::<Result<Vec<_>>>()
    };
    let sym = ratios(&cfg.symmetric_alphas, true)?;
    let gen = ratios(&cfg.general_alphas, false)?;

    let mut rb = ReportBuilder::new("sweep", json!({ "kind": "sandwich", "config": cfg }));
    for (label, alphas, rows, lower_factor) in [
        ("symmetric", &cfg.symmetric_alphas, &sym, 1.0),
        ("general", &cfg.general_alphas, &gen, 0.5),
    ] {
        let lo = rb.check(
            format!("{label}_lower"),
            "N_α / var ≥ C₋(α) (halved for general densities)",
            cfg.tolerance,
        );
        let hi = rb.check(format!("{label}_upper"), "N_α / var ≤ C₊(α)", cfg.tolerance);
        let consts = alphas
            .iter()
            .map(|&a| sandwich_constants(a))
            .collect::<Result<Vec<_>>>()?;
        for (i, (seed, r)) in rows.iter().enumerate() {
            for ((&a, c), &x) in alphas.iter().zip(&consts).zip(r) {
                let input = json!({ "sample": i, "seed": seed, "alpha": a });
                rb.record(lo, input.clone(), x, x / (lower_factor * c.c_minus) - 1.0);
                rb.record(hi, input, x, 1.0 - x / c.c_plus);
            }
        }
    }

    let opts = PiecewiseOptions::default();
    let lo_eq = rb.check(
        "lower_equality",
        "the extremizer attains N_α = C₋(α) var",
        cfg.lower_equality_tolerance,
    );
    for &a in &cfg.symmetric_alphas {
        let (name, d) = if a <= alpha_star_f64() {
            ("uniform", NamedDensity::Uniform { halfwidth: 1.0 })
        } else {
            (
                "two_sided_exp",
                NamedDensity::TwoSidedExponential { rate: 1.0 },
            )
        };
        let f = d.to_piecewise(&opts)?;
        let x = entropy_power(&f, EntropyOrder::new(a)?) / f.variance();
        let rel = x / sandwich_constants(a)?.c_minus - 1.0;
        rb.record(lo_eq, json!({ "density": name, "alpha": a }), x, -rel.abs());
    }
    let hi_eq = rb.check(
        "upper_equality",
        "the generalized Gaussian attains N_α = C₊(α) var",
        cfg.upper_equality_tolerance,
    );
    for a in [1.5, 2.0, 3.0] {
        let z = matched_generalized_gaussian(a, 1.0, cfg.resolution)?;
        let x = entropy_power(&z, EntropyOrder::new(a)?) / z.variance();
        let diff = x - sandwich_constants(a)?.c_plus;
        rb.record(
            hi_eq,
            json!({ "alpha": a, "resolution": cfg.resolution }),
            x,
            -diff.abs(),
        );
    }
    Ok(rb.finish(elapsed_ms(start)))
}

/// Configuration of [`verify_reverse_epi`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpiSweep {
    pub symmetric_alphas: Vec<f64>,
    pub general_alphas: Vec<f64>,
    /// Number of independent pairs per regime.
    pub sampling: Sampling,
    pub grid: GridConfig,
    /// Absolute tolerance on `cap (N_α(X) + N_α(Y)) - N_α(X+Y)`.
    pub tolerance: f64,
}

impl EpiSweep {
    pub fn new(seed: u64, pairs: usize) -> Self {
        Self {
            symmetric_alphas: vec![1.5, 2.0],
            general_alphas: vec![2.0],
            sampling: Sampling::new(seed, pairs),
            grid: GridConfig::default(),
            tolerance: 1e-6,
        }
    }
}

/// Second member of pair `i` is rescaled by `2^{(i mod 5 - 2)/2}` so the
/// sweep also mixes different spreads.
fn pair(
    sampling: &Sampling,
    i: usize,
    symmetric: bool,
) -> Result<(
    u64,
    u64,
    PiecewiseLogLinearDensity,
    PiecewiseLogLinearDensity,
)> {
    let (sx, x) = sampling.draw(2 * i, symmetric)?;
    let (sy, y) = sampling.draw(2 * i + 1, symmetric)?;
    let lambda = 2f64.powf(((i % 5) as f64 - 2.0) / 2.0);
    Ok((sx, sy, x, y.rescale(lambda)?))
}

/// Reverse entropy power inequalities over independent sampled pairs.
pub fn verify_reverse_epi(cfg: &EpiSweep) -> Result<VerificationReport> {
    let start = Instant::now();
    cfg.sampling.validate()?;
    cfg.grid.validate()?;
    let mut rb = ReportBuilder::new("epi-check", json!({ "kind": "reverse_epi", "config": cfg }));
    for (label, regime, alphas) in [
        ("symmetric", Regime::Symmetric, &cfg.symmetric_alphas),
        ("general", Regime::General, &cfg.general_alphas),
    ] {
        if alphas.is_empty() {
            continue;
        }
        let rows = (0..cfg.sampling.samples)
            .into_par_iter()
            .map(|i| {
                let (sx, sy, x, y) = pair(&cfg.sampling, i, regime == Regime::Symmetric)?;
                Ok((
                    sx,
                    sy,
                    reverse_epi_checks(&x, &y, alphas, regime, &cfg.grid)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let claim = match regime {
            Regime::Symmetric => "N_α(X+Y) ≤ (C₊/C₋)(N_α(X) + N_α(Y))",
            Regime::General => "N_α(X+Y) ≤ (2C₊/C₋)(N_α(X) + N_α(Y))",
        };
        let id = rb.check(format!("{label}_reverse_epi"), claim, cfg.tolerance);
        for (i, (sx, sy, rs)) in rows.iter().enumerate() {
            for r in rs {
                let input = json!({ "pair": i, "seed_x": sx, "seed_y": sy, "alpha": r.alpha, "cap": r.cap });
                rb.record(id, input, r.ratio, r.slack);
            }
        }
    }

    // U(-1,1) ∗ U(-1,1) is the triangle on [-2, 2] with ∫ tri² = 1/3
    let u = NamedDensity::Uniform { halfwidth: 1.0 }.to_piecewise(&PiecewiseOptions::default())?;
    let r = reverse_epi_checks(&u, &u, &[2.0], Regime::Symmetric, &cfg.grid)?.remove(0);
    let oracle = rb.check(
        "uniform_triangle_oracle",
        "grid N₂(U∗U) equals the triangle value 9",
        cfg.tolerance,
    );
    rb.record(
        oracle,
        json!({ "alpha": 2.0, "expected_h2": 3f64.ln() }),
        r.power_sum,
        -(0.5 * r.power_sum.ln() - 3f64.ln()).abs(),
    );
    Ok(rb.finish(elapsed_ms(start)))
}

/// Configuration of [`verify_difference`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSweep {
    pub alphas: Vec<f64>,
    pub sampling: Sampling,
    pub grid: GridConfig,
    pub tolerance: f64,
}

impl DifferenceSweep {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self {
            alphas: vec![2.0, 3.0],
            sampling: Sampling::new(seed, samples),
            grid: GridConfig::default(),
            tolerance: 1e-6,
        }
    }
}

/// `h_α(X - Y) ≤ h_α(X) + log 2` for i.i.d. sampled `X`, `Y`.
pub fn verify_difference(cfg: &DifferenceSweep) -> Result<VerificationReport> {
    let start = Instant::now();
    cfg.sampling.validate()?;
    cfg.grid.validate()?;
    let rows = (0..cfg.sampling.samples)
        .into_par_iter()
        .map(|i| {
            let (seed, f) = cfg.sampling.draw(i, false)?;
            Ok((seed, difference_entropy_checks(&f, &cfg.alphas, &cfg.grid)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rb = ReportBuilder::new("sweep", json!({ "kind": "difference", "config": cfg }));
    let id = rb.check(
        "difference_entropy",
        "h_α(X - Y) ≤ h_α(X) + log 2",
        cfg.tolerance,
    );
    for (i, (seed, ds)) in rows.iter().enumerate() {
        for d in ds {
            rb.record(
                id,
                json!({ "sample": i, "seed": seed, "alpha": d.alpha }),
                d.difference_entropy,
                d.slack,
            );
        }
    }
    let x = NamedDensity::OneSidedExponential { rate: 1.0 }
        .to_piecewise(&PiecewiseOptions::default())?;
    let eq = rb.check(
        "one_sided_equality",
        "equality for the one-sided exponential",
        cfg.tolerance,
    );
    for d in difference_entropy_checks(&x, &cfg.alphas, &cfg.grid)? {
        rb.record(
            eq,
            json!({ "density": "one_sided_exp", "alpha": d.alpha }),
            d.slack,
            -d.slack.abs(),
        );
    }
    Ok(rb.finish(elapsed_ms(start)))
}

/// Configuration of [`verify_relative`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeSweep {
    pub alphas: Vec<f64>,
    pub sampling: Sampling,
    pub resolution: usize,
    pub self_tolerance: f64,
    pub gap_tolerance: f64,
    pub constant_tolerance: f64,
}

impl RelativeSweep {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self {
            alphas: vec![1.5, 2.0, 3.0],
            sampling: Sampling::new(seed, samples),
            resolution: 10_000,
            self_tolerance: 1e-9,
            gap_tolerance: 1e-6,
            constant_tolerance: 1e-4,
        }
    }
}

/// Relative α-entropy against the matched generalized Gaussian.
pub fn verify_relative(cfg: &RelativeSweep) -> Result<VerificationReport> {
    let start = Instant::now();
    cfg.sampling.validate()?;
    let units = cfg
        .alphas
        .iter()
        .map(|&a| matched_generalized_gaussian(a, 1.0, cfg.resolution))
        .collect::<Result<Vec<_>>>()?;
    let rows = (0..cfg.sampling.samples)
        .into_par_iter()
        .map(|i| {
            let (seed, x) = cfg.sampling.draw(i, true)?;
            let per_alpha = cfg
                .alphas
                .iter()
                .zip(&units)
                .map(|(&a, z)| {
                    Ok((
                        relative_alpha_entropy(&x, &x, a)?,
                        relative_check_with(&x, z, a)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((seed, per_alpha))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rb = ReportBuilder::new("relative-check", json!({ "config": cfg }));
    let own = rb.check("self_relative_zero", "I_α(X‖X) = 0", cfg.self_tolerance);
    let nonneg = rb.check("relative_nonnegative", "I_α(X‖Z) ≥ 0", cfg.self_tolerance);
    let gap = rb.check(
        "entropy_gap_bound",
        "I_α(X‖Z) ≤ h_α(Z) - h_α(X)",
        cfg.gap_tolerance,
    );
    let bound = rb.check("constant_bound", "I_α(X‖Z) ≤ C(α)", cfg.constant_tolerance);
    for (i, (seed, per_alpha)) in rows.iter().enumerate() {
        for (&a, (own_value, r)) in cfg.alphas.iter().zip(per_alpha) {
            let input = json!({ "sample": i, "seed": seed, "alpha": a });
            rb.record(own, input.clone(), *own_value, -own_value.abs());
            rb.record(nonneg, input.clone(), r.relative, r.relative);
            rb.record(gap, input.clone(), r.relative, r.gap_slack);
            rb.record(bound, input, r.relative, r.constant_slack);
        }
    }
    let cross = rb.check(
        "constant_cross_check",
        "C(α) = h_α(Z₁) - c(α) for the unit-variance generalized Gaussian Z₁",
        cfg.constant_tolerance,
    );
    let nonneg_c = rb.check("constant_nonnegative", "C(α) ≥ 0", 0.0);
    for (&a, z) in cfg.alphas.iter().zip(&units) {
        let c = relative_bound_constant(a)?;
        let oracle =
            renyi_entropy(z, EntropyOrder::new(a)?) - min_entropy_constant(a, Regime::Symmetric)?;
        rb.record(
            cross,
            json!({ "alpha": a, "oracle": oracle }),
            c,
            -(c - oracle).abs(),
        );
        rb.record(nonneg_c, json!({ "alpha": a }), c, c);
    }
    Ok(rb.finish(elapsed_ms(start)))
}
