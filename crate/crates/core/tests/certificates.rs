use lc_renyi::bounds::{alpha_star, alpha_star_enclosure, alpha_star_f64};
use lc_renyi::certificates::{
    certify_series, certify_series_report, part_e_bound, tail_bound_part_d, tail_bound_part_e,
    SeriesConfig, SeriesPart,
};
use lc_renyi::interval::{parse_rational, RationalInterval};
use lc_renyi::series::{
    check_sign_pattern, coefficient_sign, coefficients_part_d, coefficients_part_e,
    part_d_expression, part_e_expression, sign_change_conclusion, AlphaPolynomial, AlphaSeries,
    EndpointData, ExpectedSign, ObservedSign, SignPattern,
};
use lc_renyi::Error;
use num_rational::BigRational;
use std::time::Instant;

/// `e^{λb}` Taylor coefficients in doubles.
fn exp_coeffs(lambda: f64, n: usize) -> Vec<f64> {
    let mut c = vec![1.0; n + 1];
    for k in 1..=n {
        c[k] = c[k - 1] * lambda / k as f64;
    }
    c
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum())
        .collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Direct double-precision Taylor expansion of the (e) numerator by series products.
fn part_e_floats(al: f64, n: usize) -> Vec<f64> {
    let mut e1 = exp_coeffs(1.0, n);
    e1[0] = 0.0;
    let mut ea = exp_coeffs(al, n);
    ea[0] = 0.0;
    // b² + 2b - 2e^b + 2
    let mut quad = scale(&exp_coeffs(1.0, n), -2.0);
    quad[0] += 2.0;
    quad[1] += 2.0;
    quad[2] += 1.0;
    let mut b2 = vec![0.0; n + 1];
    b2[2] = 1.0;
    let t1 = scale(&mul(&quad, &e1), 2.0 * al);
    let t2 = scale(&mul(&ea, &quad), 1.0 - 3.0 * al);
    let t3 = scale(&mul(&mul(&b2, &e1), &ea), 1.0 - al);
    add(&add(&t1, &t2), &t3)
}

fn part_e_direct(al: f64, b: f64) -> f64 {
    let quad = b * b + 2.0 * b - 2.0 * b.exp() + 2.0;
    let e1 = b.exp_m1();
    let ea = (al * b).exp_m1();
    2.0 * al * quad * e1 + (1.0 - 3.0 * al) * ea * quad + b * b * (1.0 - al) * e1 * ea
}

fn part_d_direct(al: f64, b: f64) -> f64 {
    let e1 = b.exp_m1();
    let e1b = e1 - b;
    let ea = (al * b).exp_m1();
    let bracket = -e1 * e1b * (al + 1.0) * al + 2.0 * e1b * al * ea - b * e1 * (al - 1.0) * ea;
    let weights =
        b.exp() * (1.0 - 3.0 * al) + 2.0 * al * (al * b).exp() + (al - 1.0) * (al * b + b).exp();
    bracket * weights
        + al * (al - 1.0) * e1 * e1b * ea * (b.exp() * (3.0 * al - 1.0) - 2.0 * (al * b).exp())
}

#[test]
fn part_e_low_orders_vanish_as_polynomials() {
    let s = coefficients_part_e(40).unwrap();
    for n in 0..=4 {
        assert!(
            s.coefficient(n).is_zero(),
            "order {n}: {}",
            s.coefficient(n)
        );
    }
    for n in 5..=8 {
        assert!(!s.coefficient(n).is_zero());
    }
    let d = coefficients_part_d(40).unwrap();
    assert!(d.coefficient(0).is_zero() && d.coefficient(1).is_zero());
    assert!(coefficients_part_e(7).is_err());
    assert!(coefficients_part_d(29).is_err());
}

#[test]
fn part_e_coefficients_match_float_expansion() {
    let a = alpha_star_f64();
    let s = coefficients_part_e(16).unwrap();
    let f = part_e_floats(a, 16);
    for n in 5..=16 {
        let exact = s.coefficient(n).eval_f64(a);
        assert!(
            (exact - f[n]).abs() <= 1e-9 * f[n].abs(),
            "n={n}: {exact} vs {}",
            f[n]
        );
    }
}

#[test]
fn series_sums_reproduce_the_expressions() {
    let a = alpha_star_f64();
    let e = coefficients_part_e(40).unwrap();
    let d = coefficients_part_d(40).unwrap();
    for b in [0.1, 0.05] {
        let ve = part_e_direct(a, b);
        // the direct form cancels about four digits at this b
        assert!(
            (e.eval_f64(a, b) - ve).abs() <= 1e-12,
            "{} vs {ve}",
            e.eval_f64(a, b)
        );
        assert!((e.eval_f64(a, b) - ve).abs() <= 1e-8 * ve.abs());
        let vd = part_d_direct(a, b);
        assert!(
            (d.eval_f64(a, b) - vd).abs() <= 1e-12,
            "{} vs {vd}",
            d.eval_f64(a, b)
        );
    }
    // the exponential-polynomial forms evaluate to the same functions
    for b in [0.3, 1.0, 2.5] {
        for al in [1.1, a, 2.0] {
            let ve = part_e_direct(al, b);
            assert!((part_e_expression().eval_f64(al, b) - ve).abs() <= 1e-9 * (1.0 + ve.abs()));
            let vd = part_d_direct(al, b);
            assert!((part_d_expression().eval_f64(al, b) - vd).abs() <= 1e-9 * (1.0 + vd.abs()));
        }
    }
}

#[test]
fn series_product_route_matches_exponential_route() {
    // rebuild the (e) numerator by truncated series products
    let n = 24;
    let alpha = AlphaPolynomial::alpha();
    let one = AlphaSeries::polynomial(n, &[1]);
    let e1 = AlphaSeries::exp(1, 0, n).sub(&one).unwrap();
    let ea = AlphaSeries::exp(0, 1, n).sub(&one).unwrap();
    let quad = AlphaSeries::polynomial(n, &[2, 2, 1])
        .sub(&AlphaSeries::exp(1, 0, n).scale(&AlphaPolynomial::from_integers(&[2])))
        .unwrap();
    let t1 = quad
        .mul(&e1)
        .unwrap()
        .scale(&alpha.scale(&BigRational::from_integer(2.into())));
    let t2 = ea
        .mul(&quad)
        .unwrap()
        .scale(&AlphaPolynomial::from_integers(&[1, -3]));
    let t3 = AlphaSeries::polynomial(n, &[0, 0, 1])
        .mul(&e1)
        .unwrap()
        .mul(&ea)
        .unwrap()
        .scale(&AlphaPolynomial::from_integers(&[1, -1]));
    let product_route = t1.add(&t2).unwrap().add(&t3).unwrap();
    assert_eq!(product_route, part_e_expression().to_series(n));
}

#[test]
fn sign_patterns_certify_at_default_width() {
    let enc = alpha_star_enclosure();
    let e = check_sign_pattern(
        &coefficients_part_e(16).unwrap(),
        enc,
        &SignPattern::part_e(),
    )
    .unwrap();
    assert!(e.pass && e.indeterminate.is_empty());
    let d = check_sign_pattern(
        &coefficients_part_d(30).unwrap(),
        enc,
        &SignPattern::part_d(),
    )
    .unwrap();
    assert!(d.pass && d.indeterminate.is_empty());
    assert!(e
        .entries
        .iter()
        .filter(|x| x.n <= 4)
        .all(|x| x.zero_polynomial));
    assert!(e
        .entries
        .iter()
        .filter(|x| (5..=7).contains(&x.n))
        .all(|x| x.observed == ObservedSign::Positive));
}

#[test]
fn widened_enclosure_is_never_a_false_pass() {
    let wide = RationalInterval::new(
        BigRational::from_integer(1.into()),
        BigRational::from_integer(2.into()),
    )
    .unwrap();
    let e = check_sign_pattern(
        &coefficients_part_e(16).unwrap(),
        &wide,
        &SignPattern::part_e(),
    )
    .unwrap();
    assert!(!e.pass);
    assert!(!e.indeterminate.is_empty());
    // exact zeros stay certified whatever the enclosure
    assert!(e.entries.iter().filter(|x| x.n <= 4).all(|x| x.certified));
    let d = check_sign_pattern(
        &coefficients_part_d(30).unwrap(),
        &wide,
        &SignPattern::part_d(),
    )
    .unwrap();
    assert!(!d.pass && !d.indeterminate.is_empty());
    let cfg = SeriesConfig {
        enclosure: Some(wide),
        ..SeriesConfig::default()
    };
    let run = certify_series(SeriesPart::E, &cfg).unwrap();
    assert!(!run.pass && run.conclusion.is_none());
}

#[test]
fn tighter_enclosure_never_flips_a_sign() {
    let coarse = alpha_star(&parse_rational("1e-6").unwrap()).unwrap();
    let fine = alpha_star(&parse_rational("1e-45").unwrap()).unwrap();
    let s = coefficients_part_d(60).unwrap();
    for n in 0..=60 {
        let (a, ia) = coefficient_sign(s.coefficient(n), &coarse);
        let (b, ib) = coefficient_sign(s.coefficient(n), &fine);
        if a != ObservedSign::Indeterminate {
            assert_eq!(a, b, "n={n}");
        }
        assert!(ib.is_subset_of(&ia), "n={n}");
    }
}

#[test]
fn e_tail_bound_dominates_the_true_coefficient() {
    let enc = alpha_star_enclosure();
    let s = coefficients_part_e(80).unwrap();
    let mut fact = BigRational::from_integer(1.into());
    for n in 1..=80usize {
        fact *= BigRational::from_integer(n.into());
        if n < 17 {
            continue;
        }
        let coef = s.coefficient(n).eval_interval(enc).scale(&fact);
        let gap = &part_e_bound(n, enc) - &coef;
        assert!(gap.is_nonnegative(), "n={n}");
    }
}

#[test]
fn tail_examples() {
    let enc = alpha_star_enclosure();
    let e = tail_bound_part_e(17..=200, enc).unwrap();
    assert!(e.pass && e.closed_for_all_n);
    assert_eq!(e.rows.len(), 184);
    let d = tail_bound_part_d(30..=200, enc).unwrap();
    assert!(d.pass && d.closed_for_all_n);
    let at30 = &d.rows[0];
    assert!(at30.claims.iter().all(|c| c.holds));
    // below the claimed start the bound is reported as failing
    let d20 = tail_bound_part_d(20..=20, enc).unwrap();
    assert!(
        !d20.rows[0]
            .claims
            .iter()
            .find(|c| c.name == "final_bound_negative")
            .unwrap()
            .holds
    );
    // the (2α+1) ratio is too small for the slope inequality at n = 30
    assert!(!d.informational[0].holds);
}

#[test]
fn full_certificates_pass_within_budget() {
    let start = Instant::now();
    for part in [SeriesPart::E, SeriesPart::D] {
        let (run, report) = certify_series_report(part, &SeriesConfig::default()).unwrap();
        assert!(run.pass, "{part:?}");
        assert!(!run.refined);
        assert_eq!(run.conclusion, Some(true));
        assert!(run.pattern.indeterminate.is_empty());
        assert!(report.pass);
        assert!(report.checks.iter().all(|c| c.pass));
    }
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn conclusion_logic() {
    let enc = alpha_star_enclosure();
    let ends = EndpointData {
        zero_limit_nonnegative: true,
        infinity_limit_nonnegative: true,
        denominators_positive: true,
    };
    // + - + violates the single sign change
    let s = AlphaSeries::new(
        3,
        vec![
            AlphaPolynomial::from_integers(&[1]),
            AlphaPolynomial::from_integers(&[-1]),
            AlphaPolynomial::from_integers(&[1]),
        ],
    );
    let pat = SignPattern::new(vec![
        (0, 0, ExpectedSign::Positive),
        (1, 1, ExpectedSign::Negative),
        (2, 2, ExpectedSign::Positive),
    ])
    .unwrap();
    let cert = check_sign_pattern(&s, enc, &pat).unwrap();
    assert!(cert.pass);
    assert!(!sign_change_conclusion(&cert, true, &ends).unwrap());
    assert!(matches!(
        sign_change_conclusion(&cert, false, &ends),
        Err(Error::Inconsistent(_))
    ));

    let e = check_sign_pattern(
        &coefficients_part_e(16).unwrap(),
        enc,
        &SignPattern::part_e(),
    )
    .unwrap();
    assert!(sign_change_conclusion(&e, true, &SeriesPart::E.endpoints()).unwrap());
    let bad_end = EndpointData {
        zero_limit_nonnegative: false,
        ..ends
    };
    assert!(!sign_change_conclusion(&e, true, &bad_end).unwrap());

    let wide = RationalInterval::new(
        BigRational::from_integer(1.into()),
        BigRational::from_integer(2.into()),
    )
    .unwrap();
    let w = check_sign_pattern(
        &coefficients_part_e(16).unwrap(),
        &wide,
        &SignPattern::part_e(),
    )
    .unwrap();
    assert!(matches!(
        sign_change_conclusion(&w, true, &ends),
        Err(Error::Inconsistent(_))
    ));
}
