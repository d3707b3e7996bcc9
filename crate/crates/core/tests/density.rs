mod common;

use approx::assert_relative_eq;
use common::integrate_pieces;
use lc_renyi::density::{
    sample_logconcave, DensitySpec, NamedDensity, PiecewiseLogLinearDensity, PiecewiseOptions,
    SampleConfig,
};
use proptest::prelude::*;

fn pw(d: NamedDensity) -> PiecewiseLogLinearDensity {
    d.to_piecewise(&PiecewiseOptions::default()).unwrap()
}

#[test]
fn pdf_examples() {
    let u = pw(NamedDensity::Uniform { halfwidth: 1.0 });
    assert_eq!(u.pdf_at(0.0), 0.5);
    assert_eq!(u.pdf_at(2.0), 0.0);
    let e = pw(NamedDensity::TwoSidedExponential { rate: 1.0 });
    assert_relative_eq!(e.pdf_at(1.0), 0.5 * (-1.0f64).exp(), max_relative = 1e-11);
}

#[test]
fn moment_examples() {
    for l in [0.5, 1.0, 3.0] {
        let u = pw(NamedDensity::Uniform { halfwidth: l });
        assert_relative_eq!(u.variance(), l * l / 3.0, max_relative = 1e-14);
    }
    let e = pw(NamedDensity::TwoSidedExponential { rate: 1.0 });
    assert_relative_eq!(e.variance(), 2.0, max_relative = 1e-9);
    let o = pw(NamedDensity::OneSidedExponential { rate: 1.0 });
    assert_relative_eq!(o.variance(), 1.0, max_relative = 1e-9);
    assert_relative_eq!(o.mean(), 1.0, max_relative = 1e-9);
    assert_relative_eq!(o.moment(0).unwrap(), 1.0, max_relative = 1e-12);
    assert!(o.moment(3).is_err());
}

#[test]
fn lp_mass_examples() {
    let u = pw(NamedDensity::Uniform { halfwidth: 1.0 });
    assert_relative_eq!(u.lp_mass(2.0).unwrap(), 0.5, max_relative = 1e-14);
    let e = pw(NamedDensity::TwoSidedExponential { rate: 1.0 });
    assert_relative_eq!(e.lp_mass(2.0).unwrap(), 0.25, max_relative = 1e-11);
    for seed in 0..20 {
        let d = sample_logconcave(seed, &SampleConfig::default()).unwrap();
        assert_relative_eq!(d.lp_mass(1.0).unwrap(), 1.0, max_relative = 1e-10);
    }
}

#[test]
fn extremal_normalization_matches_hand_formula() {
    let d = pw(NamedDensity::Extremal {
        a: 1.0,
        b: 1.0,
        gamma: 1.0,
    });
    assert_eq!(d.num_segments(), 3);
    assert!(d.is_symmetric());
    let c = 0.5 / (1.0 + 1.0 - (-1.0f64).exp());
    assert_relative_eq!(d.pdf_at(0.3), c, max_relative = 1e-14);
    assert_relative_eq!(d.pdf_at(1.5), c * (-0.5f64).exp(), max_relative = 1e-14);
}

/// Variance of each named family by direct quadrature of its formula.
fn quadrature_variance(d: NamedDensity) -> f64 {
    let (pdf, breaks): (Box<dyn Fn(f64) -> f64>, Vec<f64>) = match d {
        NamedDensity::Uniform { halfwidth } => (
            Box::new(move |_| 0.5 / halfwidth),
            vec![-halfwidth, halfwidth],
        ),
        NamedDensity::TwoSidedExponential { rate } => (
            Box::new(move |x: f64| 0.5 * rate * (-rate * x.abs()).exp()),
            vec![-60.0 / rate, 0.0, 60.0 / rate],
        ),
        NamedDensity::OneSidedExponential { rate } => {
            let m = 1.0 / rate;
            return integrate_pieces(
                &|x: f64| rate * (-rate * x).exp() * (x - m) * (x - m),
                &[0.0, 1.0 / rate, 80.0 / rate],
                1e-14,
            );
        }
        NamedDensity::GeneralizedGaussian { order, variance } => {
            // unnormalized (1 - (x/R)²)^{1/(order-1)}
            let beta = 1.0 / (order - 1.0);
            let r = (variance * (2.0 * beta + 3.0)).sqrt();
            let shape = move |x: f64| (1.0 - (x / r).powi(2)).max(0.0).powf(beta);
            let z = integrate_pieces(&shape, &[-r, 0.0, r], 1e-15);
            (Box::new(move |x| shape(x) / z), vec![-r, 0.0, r])
        }
        NamedDensity::Extremal { a, b, gamma } => {
            let c = 0.5 / (a + (1.0 - (-gamma * b).exp()) / gamma);
            let f = move |x: f64| {
                let t = x.abs();
                if t <= a {
                    c
                } else {
                    c * (-gamma * (t - a)).exp()
                }
            };
            (Box::new(f), vec![-a - b, -a, a, a + b])
        }
    };
    integrate_pieces(&|x| pdf(x) * x * x, &breaks, 1e-14)
}

#[test]
fn named_variances_match_closed_form_and_quadrature() {
    let cases = [
        NamedDensity::Uniform { halfwidth: 1.7 },
        NamedDensity::TwoSidedExponential { rate: 0.6 },
        NamedDensity::OneSidedExponential { rate: 2.5 },
        NamedDensity::GeneralizedGaussian {
            order: 1.5,
            variance: 2.0,
        },
        NamedDensity::GeneralizedGaussian {
            order: 4.0,
            variance: 0.3,
        },
        NamedDensity::Extremal {
            a: 1.0,
            b: 1.0,
            gamma: 1.0,
        },
        NamedDensity::Extremal {
            a: 0.2,
            b: 5.0,
            gamma: 3.0,
        },
        NamedDensity::Extremal {
            a: 2.0,
            b: 0.01,
            gamma: 0.5,
        },
    ];
    for d in cases {
        let closed = d.variance();
        let oracle = quadrature_variance(d);
        assert_relative_eq!(closed, oracle, max_relative = 1e-9);
        assert_relative_eq!(pw(d).variance(), closed, max_relative = 1e-9);
    }
}

#[test]
fn density_spec_parses_every_documented_form() {
    let inputs = [
        r#"{"type":"uniform","halfwidth":1}"#,
        r#"{"type":"two_sided_exp","rate":1}"#,
        r#"{"type":"one_sided_exp","rate":1}"#,
        r#"{"type":"generalized_gaussian","order":2,"variance":1}"#,
        r#"{"type":"extremal","a":1,"b":1,"gamma":1}"#,
        r#"{"type":"piecewise","knots":[-1,0,1],"potential":[1,0,1]}"#,
    ];
    for s in inputs {
        let spec: DensitySpec = serde_json::from_str(s).unwrap();
        let d = spec.to_piecewise(&PiecewiseOptions::default()).unwrap();
        assert_relative_eq!(d.mass(), 1.0, max_relative = 1e-10);
    }
    let bad = r#"{"type":"piecewise","knots":[0,1,2],"potential":[0,1,0]}"#;
    let spec: DensitySpec = serde_json::from_str(bad).unwrap();
    assert!(spec.to_piecewise(&PiecewiseOptions::default()).is_err());
}

#[test]
fn sampler_examples() {
    let sym = SampleConfig {
        symmetric: true,
        max_knots: 10,
        support_scale: 2.0,
    };
    let d = sample_logconcave(7, &sym).unwrap();
    let slopes = d.slopes();
    assert!(slopes.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    assert_relative_eq!(d.mass(), 1.0, max_relative = 1e-10);
    assert_eq!(d, sample_logconcave(7, &sym).unwrap());

    let general = SampleConfig {
        symmetric: false,
        ..sym
    };
    let g = sample_logconcave(8, &general).unwrap();
    assert!(g.mean().abs() > 1e-6);
}

fn lp_by_quadrature(d: &PiecewiseLogLinearDensity, p: f64) -> f64 {
    integrate_pieces(&|x| d.pdf_at(x).powf(p), d.knots(), 1e-15)
}

#[test]
fn lp_mass_agrees_with_quadrature_on_random_densities() {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let cfg = SampleConfig {
            symmetric: seed % 2 == 0,
            max_knots: 9,
            support_scale: 1.0 + (seed % 5) as f64,
        };
        let d = sample_logconcave(seed, &cfg).unwrap();
        for p in [0.5, 1.0, 2.0, 5.0] {
            let exact = d.lp_mass(p).unwrap();
            let quad = lp_by_quadrature(&d, p);
            worst = worst.max(((exact - quad) / quad).abs());
        }
    }
    assert!(worst <= 1e-9, "worst relative error {worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_satisfy_invariants(seed in any::<u64>(), symmetric in any::<bool>(), knots in 2usize..16, scale in 0.05f64..20.0) {
        let cfg = SampleConfig { symmetric, max_knots: knots, support_scale: scale };
        let d = sample_logconcave(seed, &cfg).unwrap();
        let s = d.slopes();
        for w in s.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs() + w[1].abs()));
        }
        prop_assert!((d.mass() - 1.0).abs() <= 1e-10);
        prop_assert_eq!(d.is_symmetric(), symmetric);
    }

    #[test]
    fn rescaling_divides_variance(seed in any::<u64>(), symmetric in any::<bool>(), lambda in 0.01f64..100.0) {
        let cfg = SampleConfig { symmetric, ..SampleConfig::default() };
        let d = sample_logconcave(seed, &cfg).unwrap();
        let r = d.rescale(lambda).unwrap();
        prop_assert!((r.variance() * lambda * lambda / d.variance() - 1.0).abs() < 1e-12);
        prop_assert!((r.mass() - 1.0).abs() <= 1e-10);
        prop_assert!((r.pdf_at(0.3 / lambda) - lambda * d.pdf_at(0.3)).abs() <= 1e-12 * lambda * d.pdf_at(0.3).max(1e-300));
    }

    #[test]
    fn lp_mass_is_positive_and_consistent(seed in any::<u64>(), p in 0.05f64..20.0) {
        let d = sample_logconcave(seed, &SampleConfig::default()).unwrap();
        let m = d.lp_mass(p).unwrap();
        prop_assert!(m > 0.0 && m.is_finite());
        prop_assert!((m.ln() - d.log_lp_mass(p)).abs() < 1e-12);
    }
}
