use lc_renyi::bounds::{alpha_star_enclosure, alpha_star_f64, theorem_slack, Regime};
use lc_renyi::density::{NamedDensity, PiecewiseOptions};
use lc_renyi::gfunction::{
    boundary_d, boundary_e, boundary_inequalities, g_eval, g_partial_a, h_limit_functions,
    third_derivative_limit, verify_g_signs, GPoint, GridConfig, LemmaPart,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Truncated Taylor series in ε around a fixed point; `c[k]` is the ε^k coefficient.
#[derive(Clone, Copy, Debug)]
struct Jet<const N: usize> {
    c: [f64; N],
}

impl<const N: usize> Jet<N> {
    fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Self { c }
    }

    fn variable(v: f64) -> Self {
        let mut j = Self::constant(v);
        j.c[1] = 1.0;
        j
    }

    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(o.c) {
            *x += y;
        }
        Self { c }
    }

    fn scale(self, s: f64) -> Self {
        Self {
            c: self.c.map(|x| x * s),
        }
    }

    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Self { c }
    }

    fn exp(self) -> Self {
        // y' = y u'
        let mut y = [0.0; N];
        y[0] = self.c[0].exp();
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * y[k - j];
            }
            y[k] = s / k as f64;
        }
        Self { c: y }
    }

    fn ln(self) -> Self {
        // u y' = u'
        let mut y = [0.0; N];
        y[0] = self.c[0].ln();
        for k in 1..N {
            let mut s = k as f64 * self.c[k];
            for j in 1..k {
                s -= j as f64 * y[j] * self.c[k - j];
            }
            y[k] = s / (k as f64 * self.c[0]);
        }
        Self { c: y }
    }

    fn derivative(&self, k: usize) -> f64 {
        self.c[k] * (1..=k).map(|i| i as f64).product::<f64>()
    }
}

/// G built directly from its definition with jet arithmetic in `a`.
fn g_jet(a: f64, b: f64, al: f64) -> Jet<5> {
    let x = Jet::<5>::variable(a);
    let one_m_eb = -(-b).exp_m1();
    let one_m_eab = -(-al * b).exp_m1();
    let p = x.add(Jet::constant(one_m_eb));
    let q = x.scale(al).add(Jet::constant(one_m_eab));
    let m = 2.0 / (1.0 - al);
    let n = (1.0 - 3.0 * al) / (1.0 - al);
    let lead = q.ln().scale(m).add(p.ln().scale(n)).exp().scale(2.0);
    // ∫_0^b (x+a)² e^{-x} dx = (a²+2a+2) - e^{-b}((a+b)²+2(a+b)+2)
    let a2 = x.mul(x);
    let ab = x.add(Jet::constant(b));
    let integral = a2.add(x.scale(2.0)).add(Jet::constant(2.0)).add(
        ab.mul(ab)
            .add(ab.scale(2.0))
            .add(Jet::constant(2.0))
            .scale(-(-b).exp()),
    );
    let cubic = a2.mul(x).scale(1.0 / 3.0);
    lead.add(cubic.add(integral).scale(-1.0))
}

fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1e-300)
}

fn random_points(seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)))
        .collect()
}

#[test]
fn g_examples() {
    let s = alpha_star_f64();
    for a in [0.0, 0.1, 1.0, 5.0, 10.0] {
        let v = g_eval(&GPoint::new(a, 0.0, s).unwrap());
        assert!(v.abs() <= 1e-9, "a={a}: {v}");
    }
    // two-sided exponential: G(0, b) -> 0 as b grows
    let tail = [5.0, 10.0, 20.0, 40.0].map(|b| g_eval(&GPoint::new(0.0, b, s).unwrap()).abs());
    assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(tail[3] < 1e-12);
    assert!(g_eval(&GPoint::new(1.0, 1.0, s).unwrap()) >= 0.0);
}

#[test]
fn inner_integral_matches_closed_form() {
    let s = alpha_star_f64();
    for (a, b) in random_points(7, 50) {
        let jet = g_jet(a, b, s);
        let v = g_eval(&GPoint::new(a, b, s).unwrap());
        assert!(
            (v - jet.c[0]).abs() <= 1e-12 * (1.0 + a * a * a),
            "a={a} b={b}"
        );
    }
}

#[test]
fn closed_forms_match_taylor_jets() {
    for al in [alpha_star_f64(), 1.1, 1.5, 3.0] {
        for (a, b) in random_points(11, 200) {
            let p = GPoint::new(a, b, al).unwrap();
            let jet = g_jet(a, b, al);
            for k in 1..=4u32 {
                let closed = g_partial_a(&p, k).unwrap();
                let reference = jet.derivative(k as usize);
                // the jet loses digits to cancellation; bound by the size of the pieces
                let scale = (1.0 + a).powi(3 - k as i32).max(1.0) * 1e-9;
                assert!(
                    (closed - reference).abs() <= 1e-6 * reference.abs() + scale,
                    "α={al} k={k} a={a} b={b}: {closed} vs {reference}"
                );
            }
        }
    }
}

#[test]
fn closed_forms_match_finite_differences() {
    let s = alpha_star_f64();
    let h = 1e-3;
    let central = |f: &dyn Fn(f64) -> f64, a: f64| (f(a + h) - f(a - h)) / (2.0 * h);
    for (a, b) in random_points(3, 20) {
        let g = |x: f64| g_eval(&GPoint::new(x, b, s).unwrap());
        let d = |k: u32| move |x: f64| g_partial_a(&GPoint::new(x, b, s).unwrap(), k).unwrap();

        let second_fd = (g(a + h) - 2.0 * g(a) + g(a - h)) / (h * h);
        let second = d(2)(a);
        assert!(
            rel_err(second_fd, second) <= 1e-4,
            "k=2 a={a} b={b}: {second_fd} vs {second}"
        );

        // higher orders: one central step on the next-lower closed form
        for k in 1..=4u32 {
            let fd = if k == 1 {
                central(&g, a)
            } else {
                central(&d(k - 1), a)
            };
            let closed = d(k)(a);
            assert!(
                rel_err(fd, closed) <= 1e-4,
                "k={k} a={a} b={b}: {fd} vs {closed}"
            );
        }
    }
}

#[test]
fn third_derivative_vanishes_at_large_a() {
    let s = alpha_star_f64();
    let v = g_partial_a(&GPoint::new(1e6, 1.0, s).unwrap(), 3).unwrap();
    assert!(v.abs() <= 1e-3, "{v}");
    assert!(g_partial_a(&GPoint::new(1.0, 1.0, s).unwrap(), 4).unwrap() >= 0.0);
    // off the threshold the limit is the closed expression, about 0.37 at α = 1.5
    let far = g_partial_a(&GPoint::new(1e6, 1.0, 1.5).unwrap(), 3).unwrap();
    assert!((far - third_derivative_limit(1.5)).abs() < 1e-3);
    assert!(third_derivative_limit(1.5) > 0.3);
}

#[test]
fn limit_function_examples() {
    let e = alpha_star_enclosure();
    let s = e.mid_f64();
    let h = h_limit_functions(s, 1.0).unwrap();
    assert!(h.h1.abs() <= 10.0 * e.width_f64() + 1e-14, "{}", h.h1);
    assert_eq!(h_limit_functions(s, 0.0).unwrap().h2, 0.0);
    for i in 0..=100 {
        let b = 10f64.powf(-3.0 + 5.0 * i as f64 / 100.0);
        let h = h_limit_functions(s, b).unwrap();
        assert!(h.h2 >= 0.0, "b={b}");
        assert!(
            (h.h2 - h.h2_at_star).abs() <= 1e-12 * (1.0 + h.h2.abs()),
            "b={b}"
        );
        // ∂²G at large a approaches h₂
        let d2 = g_partial_a(&GPoint::new(1e4, b, s).unwrap(), 2).unwrap();
        assert!((d2 - h.h2).abs() <= 1e-3);
    }
    assert!(h_limit_functions(1.0, 1.0).is_err());
    assert!(h_limit_functions(2.0, -1.0).is_err());
}

#[test]
fn boundary_examples() {
    let s = alpha_star_f64();
    for b in [30.0, 60.0, 100.0] {
        assert!(boundary_e(b, s).abs() < 1e-10 && boundary_d(b, s).abs() < 1e-10);
    }
    let b: f64 = 1e-3;
    assert!((boundary_d(b, s) / b.powi(3) - 1.0 / 6.0).abs() <= 1e-2);

    let grid: Vec<f64> = (0..400)
        .map(|i| 10f64.powf(-10.0 + 12.0 * i as f64 / 399.0))
        .collect();
    let rep = boundary_inequalities(&grid, s).unwrap();
    assert!(
        rep.min_e >= -1e-9 && rep.min_d >= -1e-9,
        "{} {}",
        rep.min_e,
        rep.min_d
    );
    assert!(boundary_inequalities(&[0.0], s).is_err());
}

#[test]
fn series_and_direct_forms_agree_at_cutoff() {
    let s = alpha_star_f64();
    // just above the cutoff the direct form is still usable at this precision
    for b in [2e-8, 5e-8, 1e-7] {
        let third = b * b * b;
        let e_series = third * (s.powf(2.0 / (1.0 - s)) - 1.0 / 6.0)
            + b.powi(4) * (0.125 - 0.5 * s.powf(2.0 / (1.0 - s)));
        assert!((boundary_e(b, s) - e_series).abs() <= 1e-6 * third + 1e-30);
        let d_series = b * b * (3.0 * s.powf(2.0 / (1.0 - s)) - 0.5)
            + third * (1.0 / 3.0 - s.powf(2.0 / (1.0 - s)));
        assert!((boundary_d(b, s) - d_series).abs() <= 1e-5 * third);
    }
}

#[test]
fn default_grid_passes_every_part() {
    let rep = verify_g_signs(&GridConfig::default(), &LemmaPart::ALL).unwrap();
    for c in &rep.checks {
        assert!(c.pass, "{} failed: {:?}", c.name, c.worst);
        assert!(c.cases > 0);
    }
    assert!(rep.pass);
    assert_eq!(rep.checks.len(), 11);
}

#[test]
fn negative_control_off_threshold() {
    let cfg = GridConfig {
        alpha: Some(1.5),
        ..GridConfig::default()
    };
    let a = verify_g_signs(&cfg, &[LemmaPart::A]).unwrap();
    assert!(a.pass);
    let b = verify_g_signs(&cfg, &[LemmaPart::B]).unwrap();
    assert!(!b.pass);
    let worst = b
        .check("b_third_derivative_vanishes")
        .unwrap()
        .worst
        .clone()
        .unwrap();
    assert!(worst.value > 0.3);
}

#[test]
fn invalid_configs_are_errors() {
    let bad = GridConfig {
        step: 0.0,
        ..GridConfig::default()
    };
    assert!(verify_g_signs(&bad, &[LemmaPart::A]).is_err());
    let bad = GridConfig {
        decay_a: 10.0,
        ..GridConfig::default()
    };
    assert!(verify_g_signs(&bad, &[LemmaPart::B]).is_err());
    let bad = GridConfig {
        alpha: Some(0.9),
        ..GridConfig::default()
    };
    assert!(verify_g_signs(&bad, &[LemmaPart::A]).is_err());
    assert!("x".parse::<LemmaPart>().is_err());
    assert_eq!("Chain".parse::<LemmaPart>().unwrap(), LemmaPart::Chain);
}

#[test]
fn slack_of_extremal_density_is_log_of_g() {
    // N_α = 12 var · (1 + G / M) at α*, where M = var · P is the unnormalized second moment
    let s = alpha_star_f64();
    let opts = PiecewiseOptions::default();
    for i in 0..12 {
        for j in 0..12 {
            let a = 0.05 + 0.8 * i as f64;
            let b = 0.05 + 0.8 * j as f64;
            let f = NamedDensity::Extremal { a, b, gamma: 1.0 }
                .to_piecewise(&opts)
                .unwrap();
            let slack = theorem_slack(&f, s, Regime::Symmetric).unwrap();
            let g = g_eval(&GPoint::new(a, b, s).unwrap());
            let m = f.variance() * (a - (-b).exp_m1());
            let predicted = 0.5 * (1.0 + g / m).ln();
            assert!(
                (slack - predicted).abs() <= 1e-9,
                "a={a} b={b}: {slack} vs {predicted}"
            );
            assert_eq!(g >= 0.0, slack >= -1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fourth_derivative_nonnegative_above_one_third(a in 0.0f64..50.0, b in 0.0f64..50.0, al in 1.001f64..20.0) {
        prop_assert!(g_partial_a(&GPoint::new(a, b, al).unwrap(), 4).unwrap() >= 0.0);
    }

    #[test]
    fn g_nonnegative_at_threshold(a in 0.0f64..30.0, b in 0.0f64..30.0) {
        let p = GPoint::at_alpha_star(a, b).unwrap();
        prop_assert!(g_eval(&p) >= -1e-10 * (1.0 + a).powi(3));
    }
}
