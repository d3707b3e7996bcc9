mod common;

use common::integrate_pieces;
use lc_renyi::bounds::{alpha_star_enclosure, alpha_star_f64, min_entropy_constant, Regime};
use lc_renyi::convolution::{convolution_entropies, convolve, convolve_at, GridConfig};
use lc_renyi::density::{
    sample_logconcave, NamedDensity, PiecewiseLogLinearDensity, PiecewiseOptions, SampleConfig,
};
use lc_renyi::epi::{
    difference_entropy_check, log_cross_integral, matched_generalized_gaussian,
    relative_alpha_entropy, relative_bound_constant, relative_check, reverse_epi_check,
    sandwich_constants,
};
use lc_renyi::{renyi_entropy, EntropyOrder, Error};
use proptest::prelude::*;

fn pw(d: NamedDensity) -> PiecewiseLogLinearDensity {
    d.to_piecewise(&PiecewiseOptions::default()).unwrap()
}

fn h(f: &PiecewiseLogLinearDensity, a: f64) -> f64 {
    renyi_entropy(f, EntropyOrder::new(a).unwrap())
}

fn symmetric(seed: u64) -> PiecewiseLogLinearDensity {
    sample_logconcave(seed, &SampleConfig::default()).unwrap()
}

fn general(seed: u64) -> PiecewiseLogLinearDensity {
    sample_logconcave(
        seed,
        &SampleConfig {
            symmetric: false,
            ..SampleConfig::default()
        },
    )
    .unwrap()
}

/// Simpson rule on `[-π/2, π/2]`.
fn simpson_theta(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let (a, b) = (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    let step = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * step);
    }
    s * step / 3.0
}

/// `N_α / var` of `(1 - u²)^{1/(α-1)}` by direct quadrature in `u = sin θ`.
fn c_plus_by_quadrature(alpha: f64) -> f64 {
    let beta = 1.0 / (alpha - 1.0);
    let n = 20_000;
    let mass = simpson_theta(|t| t.cos().powf(2.0 * beta + 1.0), n);
    let second = simpson_theta(|t| t.sin().powi(2) * t.cos().powf(2.0 * beta + 1.0), n);
    let power = simpson_theta(|t| t.cos().powf(2.0 * alpha * beta + 1.0), n);
    let h = (power / mass.powf(alpha)).ln() / (1.0 - alpha);
    (2.0 * h).exp() / (second / mass)
}

#[test]
fn sandwich_examples() {
    let c = sandwich_constants(2.0).unwrap();
    assert_eq!(c.c_minus, 8.0);
    assert!((c.c_plus - 125.0 / 9.0).abs() < 1e-9);
    assert_eq!(sandwich_constants(1.2).unwrap().c_minus, 12.0);
    assert!(matches!(
        sandwich_constants(1.0),
        Err(Error::InvalidParameter(_))
    ));
    assert!(sandwich_constants(0.5).is_err());
}

#[test]
fn lower_constant_branches_meet_at_threshold() {
    let enc = alpha_star_enclosure();
    let width = enc.width_f64().max(f64::EPSILON);
    for a in [enc.lo_f64(), enc.hi_f64(), alpha_star_f64()] {
        let branch = 2.0 * a.powf(2.0 / (a - 1.0));
        assert!(
            (branch - 12.0).abs() <= 10.0 * width + 1e-12,
            "{a}: {branch}"
        );
    }
    assert_eq!(
        sandwich_constants(alpha_star_f64() - 1e-6).unwrap().c_minus,
        12.0
    );
    assert!(sandwich_constants(alpha_star_f64() + 1e-6).unwrap().c_minus < 12.0);
}

#[test]
fn upper_constant_matches_quadrature_and_closed_entropy() {
    for a in [1.1, 1.3, 1.5, 2.0, 3.0, 5.0, 10.0] {
        let c = sandwich_constants(a).unwrap();
        let quad = c_plus_by_quadrature(a);
        assert!(
            (c.c_plus / quad - 1.0).abs() < 1e-8,
            "α={a}: {} vs {quad}",
            c.c_plus
        );
        let gg = NamedDensity::GeneralizedGaussian {
            order: a,
            variance: 2.5,
        };
        let closed = (2.0 * gg.renyi_entropy(EntropyOrder::new(a).unwrap())).exp() / 2.5;
        assert!((c.c_plus / closed - 1.0).abs() < 1e-10);
        assert!(c.c_minus <= c.c_plus);
    }
}

#[test]
fn generalized_gaussian_saturates_upper_constant() {
    for a in [1.5, 2.0, 3.0] {
        let z = matched_generalized_gaussian(a, 1.7, 10_000).unwrap();
        assert!((z.variance() / 1.7 - 1.0).abs() < 1e-9);
        let n = (2.0 * h(&z, a)).exp();
        let c = sandwich_constants(a).unwrap().c_plus;
        assert!(
            (n / z.variance() - c).abs() < 1e-4,
            "α={a}: {} vs {c}",
            n / z.variance()
        );
    }
    let z = matched_generalized_gaussian(2.0, 1.0, 1000).unwrap();
    let (lo, hi) = z.support();
    assert!(z.is_symmetric() && lo == -hi && hi.is_finite());
}

#[test]
fn lower_constant_saturated_by_extremizers() {
    let u = pw(NamedDensity::Uniform { halfwidth: 0.8 });
    for a in [1.05, 1.2] {
        let n = (2.0 * h(&u, a)).exp();
        assert!((n - 12.0 * u.variance()).abs() < 1e-9 * n);
        assert_eq!(sandwich_constants(a).unwrap().c_minus, 12.0);
    }
    let e = NamedDensity::TwoSidedExponential { rate: 1.3 };
    for a in [1.5, 2.0, 5.0] {
        let n = (2.0 * e.renyi_entropy(EntropyOrder::new(a).unwrap())).exp();
        let c = sandwich_constants(a).unwrap().c_minus;
        assert!((n - c * e.variance()).abs() < 1e-9 * n);
    }
}

#[test]
#[allow(clippy::approx_constant)]
fn relative_constant_values_and_cross_check() {
    for (a, expect) in [
        (1.5, 0.18829),
        (2.0, 0.27582),
        (3.0, 0.39269),
        (10.0, 0.65291),
    ] {
        let c = relative_bound_constant(a).unwrap();
        assert!(c >= 0.0);
        assert!((c - expect).abs() < 1e-5, "α={a}: {c}");
        let z1 = matched_generalized_gaussian(a, 1.0, 10_000).unwrap();
        let oracle = h(&z1, a) - min_entropy_constant(a, Regime::Symmetric).unwrap();
        assert!((c - oracle).abs() < 1e-4, "α={a}: {c} vs {oracle}");
    }
}

/// `log ∫ f g^{α-1}` by adaptive quadrature on the pdf values.
fn cross_by_quadrature(
    f: &PiecewiseLogLinearDensity,
    g: &PiecewiseLogLinearDensity,
    a: f64,
) -> f64 {
    let (fa, fb) = f.support();
    let (ga, gb) = g.support();
    let (lo, hi) = (fa.max(ga), fb.min(gb));
    let mut breaks: Vec<f64> = f
        .knots()
        .iter()
        .chain(g.knots())
        .copied()
        .filter(|&x| x > lo && x < hi)
        .chain([lo, hi])
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let eps = 1e-14 * (hi - lo);
    let integrand = |x: f64| {
        let x = x.clamp(lo + eps, hi - eps);
        f.pdf_at(x) * g.pdf_at(x).powf(a - 1.0)
    };
    integrate_pieces(&integrand, &breaks, 1e-13).ln()
}

#[test]
fn cross_integral_matches_quadrature() {
    for seed in 0..12u64 {
        let x = if seed % 2 == 0 {
            symmetric(seed)
        } else {
            general(seed)
        };
        let z = general(seed + 100).rescale(0.9).unwrap();
        for a in [1.5, 2.0, 3.0] {
            let exact = log_cross_integral(&x, &z, a).unwrap();
            let quad = cross_by_quadrature(&x, &z, a);
            assert!(
                (exact - quad).abs() < 1e-8,
                "seed {seed} α={a}: {exact} vs {quad}"
            );
        }
    }
    // α < 1 with supp x inside supp z
    let x = symmetric(3).rescale(2.0).unwrap();
    let z = symmetric(4);
    let exact = log_cross_integral(&x, &z, 0.5).unwrap();
    assert!((exact - cross_by_quadrature(&x, &z, 0.5)).abs() < 1e-8);
}

#[test]
fn relative_entropy_of_self_is_zero() {
    for seed in 0..20u64 {
        let x = if seed % 2 == 0 {
            symmetric(seed)
        } else {
            general(seed)
        };
        for a in [0.5, 1.5, 2.0, 3.0] {
            let i = relative_alpha_entropy(&x, &x, a).unwrap();
            assert!(i.abs() < 1e-9, "seed {seed} α={a}: {i}");
        }
    }
}

#[test]
fn relative_entropy_support_mismatch() {
    let x = pw(NamedDensity::Uniform { halfwidth: 2.0 });
    let z = pw(NamedDensity::Uniform { halfwidth: 1.0 });
    assert!(matches!(
        relative_alpha_entropy(&x, &z, 0.5),
        Err(Error::Divergent(_))
    ));
    // for α > 1 the mass of x outside supp z simply does not contribute
    assert!(relative_alpha_entropy(&x, &z, 2.0).unwrap() >= 0.0);
    let far = z.shift(10.0);
    assert!(matches!(
        relative_alpha_entropy(&z, &far, 2.0),
        Err(Error::Divergent(_))
    ));
    assert!(relative_alpha_entropy(&x, &x, 1.0).is_err());
}

#[test]
fn relative_bound_on_samples() {
    for seed in 0..40u64 {
        let x = symmetric(seed);
        for a in [1.5, 2.0, 3.0] {
            let r = relative_check(&x, a, 10_000).unwrap();
            assert!(r.relative >= -1e-9);
            assert!(r.gap_slack >= -1e-6, "seed {seed} α={a}: {r:?}");
            assert!(r.constant_slack >= -1e-4, "seed {seed} α={a}: {r:?}");
        }
    }
    assert!(matches!(
        relative_check(&general(1), 2.0, 1000),
        Err(Error::RegimeMismatch(_))
    ));
}

#[test]
fn uniform_convolution_is_the_triangle() {
    let u = pw(NamedDensity::Uniform { halfwidth: 1.0 });
    let g = convolve(&u, &u, &GridConfig::default()).unwrap();
    assert!((g.mass() - 1.0).abs() < 1e-9);
    assert!((g.variance() - 2.0 / 3.0).abs() < 1e-6);
    assert!(g.asymmetry() < 1e-12);
    let (lo, hi) = g.support();
    assert!((lo + 2.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
    for x in [-1.5, -0.3, 0.0, 0.7, 1.9] {
        let tri = (2.0 - f64::abs(x)) / 4.0;
        assert!((g.pdf_at(x) - tri).abs() < 1e-9);
    }
    let e = convolution_entropies(&u, &u, &[2.0, 3.0], &GridConfig::default()).unwrap();
    // ∫ tri² = 1/3 and ∫ tri³ = 1/8
    assert!((e.value(2.0).unwrap() - 3f64.ln()).abs() < 1e-6);
    assert!((e.value(3.0).unwrap() - 0.5 * 8f64.ln()).abs() < 1e-6);
}

#[test]
fn exponential_convolution_matches_closed_form() {
    let x = pw(NamedDensity::TwoSidedExponential { rate: 1.0 });
    let e = convolution_entropies(&x, &x, &[2.0], &GridConfig::default()).unwrap();
    // density (1 + |t|) e^{-|t|} / 4 has ∫ g² = 5/32
    assert!((e.values[0] - (32.0f64 / 5.0).ln()).abs() < 1e-6, "{:?}", e);
    assert!((e.variance - 4.0).abs() < 1e-6);
}

#[test]
fn convolution_variance_adds() {
    for seed in 0..10u64 {
        let x = general(seed);
        let y = symmetric(seed + 50).rescale(0.7).unwrap();
        let e = convolution_entropies(&x, &y, &[2.0], &GridConfig::default()).unwrap();
        let want = x.variance() + y.variance();
        assert!(
            (e.variance - want).abs() < 1e-6,
            "seed {seed}: {} vs {want}",
            e.variance
        );
        let g = convolve_at(&x, &y, 4096).unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-9);
        assert!((g.mean() - x.mean() - y.mean()).abs() < 1e-6);
    }
    let s = convolve(&symmetric(1), &symmetric(2), &GridConfig::default()).unwrap();
    assert!(s.asymmetry() < 1e-9);
}

#[test]
fn convolution_budget_is_reported() {
    let x = pw(NamedDensity::TwoSidedExponential { rate: 1.0 });
    let cfg = GridConfig {
        min_cells: 16,
        max_points: 100,
        tolerance: 1e-12,
    };
    assert!(matches!(
        convolution_entropies(&x, &x, &[2.0], &cfg),
        Err(Error::GridBudget {
            max_points: 100,
            ..
        })
    ));
}

#[test]
fn reverse_epi_examples() {
    let grid = GridConfig::default();
    let u = pw(NamedDensity::Uniform { halfwidth: 1.0 });
    let r = reverse_epi_check(&u, &u, 2.0, Regime::Symmetric, &grid).unwrap();
    assert!((r.cap - 125.0 / 72.0).abs() < 1e-12);
    // N₂(tri) = 9, N₂(U) = 4
    assert!((r.ratio - 9.0 / 8.0).abs() < 1e-5);
    assert!(r.ratio <= r.cap);

    let e = pw(NamedDensity::TwoSidedExponential { rate: 1.0 });
    let r = reverse_epi_check(&e, &e, 2.0, Regime::Symmetric, &grid).unwrap();
    assert!(r.ratio <= 125.0 / 72.0 && r.slack > 0.0);

    let (x, y) = (general(5), general(6));
    let r = reverse_epi_check(&x, &y, 2.0, Regime::General, &grid).unwrap();
    assert!((r.cap - 125.0 / 36.0).abs() < 1e-12);
    assert!(r.ratio <= r.cap);

    assert!(matches!(
        reverse_epi_check(&x, &y, 2.0, Regime::Symmetric, &grid),
        Err(Error::RegimeMismatch(_))
    ));
    assert!(matches!(
        reverse_epi_check(&x, &y, 1.5, Regime::General, &grid),
        Err(Error::RegimeMismatch(_))
    ));
}

#[test]
fn difference_examples() {
    let grid = GridConfig::default();
    let x = pw(NamedDensity::OneSidedExponential { rate: 1.0 });
    let d = difference_entropy_check(&x, 2.0, &grid).unwrap();
    // h₂(X) = log 2, h₂(X - Y) = log 4
    assert!((d.entropy - 2f64.ln()).abs() < 1e-9);
    assert!((d.difference_entropy - 4f64.ln()).abs() < 1e-6);
    assert!(d.slack.abs() < 1e-6);

    let u = pw(NamedDensity::Uniform { halfwidth: 1.0 });
    assert!(difference_entropy_check(&u, 2.0, &grid).unwrap().slack >= 0.0);
    assert!(matches!(
        difference_entropy_check(&u, 1.5, &grid),
        Err(Error::RegimeMismatch(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relative_entropy_is_nonnegative(s1 in 0u64..10_000, s2 in 0u64..10_000, a in 1.05f64..6.0) {
        let x = general(s1);
        let z = general(s2);
        prop_assert!(relative_alpha_entropy(&x, &z, a).unwrap() >= -1e-9);
    }

    #[test]
    fn sandwich_holds_on_symmetric_samples(seed in 0u64..10_000, a in 1.01f64..20.0) {
        let f = symmetric(seed);
        let c = sandwich_constants(a).unwrap();
        let n = (2.0 * h(&f, a)).exp();
        let v = f.variance();
        prop_assert!(n >= c.c_minus * v * (1.0 - 1e-6));
        prop_assert!(n <= c.c_plus * v * (1.0 + 1e-6));
    }

    #[test]
    fn relative_constant_is_nonnegative(a in 1.01f64..50.0) {
        prop_assert!(relative_bound_constant(a).unwrap() >= 0.0);
    }
}
