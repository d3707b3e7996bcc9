//! Exact certificates for the two boundary inequalities of `G`.
//!
//! Each boundary inequality is reduced to a single sign change of a
//! logarithmic derivative. The cleared numerator is an exponential
//! polynomial; its Taylor coefficients must be nonnegative up to some order
//! and negative afterwards. The low orders are certified coefficient by
//! coefficient, the high orders by an explicit upper bound checked per `n`
//! and closed for all `n` by a short induction whose hypotheses are
//! themselves certified.

use std::ops::RangeInclusive;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bounds::{alpha_star, DEFAULT_ENCLOSURE_WIDTH};
use crate::error::{invalid, Result};
use crate::interval::{parse_rational, rational_string, RationalInterval};
use crate::report::{ReportBuilder, VerificationReport};
use crate::series::{
    check_sign_pattern, coefficient_sign, coefficients_part_d, coefficients_part_e,
    sign_change_conclusion, AlphaSeries, EndpointData, ExpectedSign, ObservedSign, SignCertificate,
    SignPattern,
};

/// Which boundary inequality a certificate is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesPart {
    /// `∂G/∂a >= 0` at `a = 0`.
    D,
    /// `G >= 0` at `a = 0`.
    E,
}

impl SeriesPart {
    /// First order covered by the tail bound.
    pub fn tail_start(self) -> usize {
        match self {
            SeriesPart::D => 30,
            SeriesPart::E => 17,
        }
    }

    fn label(self) -> &'static str {
        match self {
            SeriesPart::D => "d",
            SeriesPart::E => "e",
        }
    }

    pub fn pattern(self) -> SignPattern {
        match self {
            SeriesPart::D => SignPattern::part_d(),
            SeriesPart::E => SignPattern::part_e(),
        }
    }

    pub fn series(self, order: usize) -> Result<AlphaSeries> {
        match self {
            SeriesPart::D => coefficients_part_d(order),
            SeriesPart::E => coefficients_part_e(order),
        }
    }

    /// Limits of the function whose derivative the series describes. For (e)
    /// that is `log G(0, b)/2 - log(1 - ½(b²+2b+2)e^{-b})`; for (d) it is
    /// `log φ₁ - log φ₂`. Both tend to 0 at either end and all cleared
    /// denominators are positive on `(0, ∞)`.
    pub fn endpoints(self) -> EndpointData {
        EndpointData {
            zero_limit_nonnegative: true,
            infinity_limit_nonnegative: true,
            denominators_positive: true,
        }
    }
}

/// One inequality checked in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub name: String,
    pub statement: String,
    pub holds: bool,
}

impl Claim {
    fn new(name: &str, statement: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailRow {
    pub n: usize,
    pub claims: Vec<Claim>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCertificate {
    pub part: SeriesPart,
    pub first: usize,
    pub last: usize,
    pub enclosure: RationalInterval,
    /// Facts about α used by the bound, certified on the enclosure.
    pub constants: Vec<Claim>,
    pub rows: Vec<TailRow>,
    /// Hypotheses that extend the per-`n` checks to every `n` past the start.
    pub induction: Vec<Claim>,
    /// Recorded for reference; not part of the pass decision.
    pub informational: Vec<Claim>,
    pub pass: bool,
    /// `pass`, the induction holds, and the range starts at the tail start.
    pub closed_for_all_n: bool,
}

/// Fractional bits kept after raising an enclosure to a power; the rounding
/// is outward, so every comparison stays sound.
const POW_BITS: u32 = 96;

fn ri(n: i64) -> RationalInterval {
    RationalInterval::from_integer(n)
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn qi(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow_q(x: &BigRational, n: usize) -> BigRational {
    let n = n as u32;
    BigRational::new(x.numer().pow(n), x.denom().pow(n))
}

fn lin(al: &RationalInterval, a: i64, b: i64) -> RationalInterval {
    // a·α + b
    &al.scale(&q(a, 1)) + &ri(b)
}

fn check_range(range: &RangeInclusive<usize>) -> Result<()> {
    if range.is_empty() || *range.start() < 2 {
        return Err(invalid(format!(
            "tail range must be nonempty and start at n >= 2, got {range:?}"
        )));
    }
    if *range.end() > 100_000 {
        return Err(invalid("tail range ends past n = 100000"));
    }
    Ok(())
}

fn finish_tail(
    part: SeriesPart,
    range: RangeInclusive<usize>,
    enclosure: &RationalInterval,
    constants: Vec<Claim>,
    rows: Vec<TailRow>,
    induction: Vec<Claim>,
    informational: Vec<Claim>,
) -> TailCertificate {
    let pass = constants.iter().all(|c| c.holds) && rows.iter().all(|r| r.pass);
    let closed = pass && induction.iter().all(|c| c.holds) && *range.start() <= part.tail_start();
    TailCertificate {
        part,
        first: *range.start(),
        last: *range.end(),
        enclosure: enclosure.clone(),
        constants,
        rows,
        induction,
        informational,
        pass,
        closed_for_all_n: closed,
    }
}

/// Upper bound for `n!` times the order-`n` coefficient of the (e) series:
/// `(6 - n(n-1)/30)(α+1)ⁿ + 8n²αⁿ`.
pub fn part_e_bound(n: usize, alpha: &RationalInterval) -> RationalInterval {
    let ap1 = lin(alpha, 1, 1);
    let lead = RationalInterval::point(q(6, 1) - qi(n * (n - 1)) / q(30, 1));
    &(&lead * &ap1.pow(n as u32).round_outward(POW_BITS))
        + &alpha
            .pow(n as u32)
            .round_outward(POW_BITS)
            .scale(&qi(8 * n * n))
}

/// Certifies that the (e) tail bound is negative for each `n` in `range`,
/// with the auxiliary facts `n(n-1)/30 > 7` and `(α+1)/α >= 8/5 > (8n²)^{1/n}`.
pub fn tail_bound_part_e(
    range: RangeInclusive<usize>,
    alpha: &RationalInterval,
) -> Result<TailCertificate> {
    check_range(&range)?;
    let ratio = lin(alpha, 1, 1).div(alpha)?;
    let constants = vec![Claim::new(
        "ratio_at_least_8_5",
        "(α+1)/α >= 8/5 on the enclosure",
        *ratio.lo() >= q(8, 5),
    )];
    let rows: Vec<TailRow> = range
        .clone()
        .into_par_iter()
        .map(|n| {
            let quad = qi(n * (n - 1)) / q(30, 1) > q(7, 1);
            let geo = pow_q(&q(8, 5), n) >= qi(8 * n * n);
            let bound = part_e_bound(n, alpha).is_negative();
            let claims = vec![
                Claim::new("quadratic_exceeds_7", format!("{n}·{}/30 > 7", n - 1), quad),
                Claim::new("geometric_dominates", format!("(8/5)^{n} >= 8·{n}²"), geo),
                Claim::new(
                    "bound_negative",
                    format!("(6 - n(n-1)/30)(α+1)^n + 8n²α^n < 0 at n = {n}"),
                    bound,
                ),
            ];
            TailRow {
                n,
                pass: claims.iter().all(|c| c.holds),
                claims,
            }
        })
        .collect();

    // every n >= 17 follows from the base case and monotone steps
    let base = 17usize;
    let induction = vec![
        Claim::new(
            "quadratic_base",
            "17·16/30 > 7, and n(n-1) increases",
            qi(base * (base - 1)) / q(30, 1) > q(7, 1),
        ),
        Claim::new(
            "geometric_base",
            "(8/5)^17 >= 8·17²",
            pow_q(&q(8, 5), base) >= qi(8 * base * base),
        ),
        Claim::new(
            "geometric_step",
            "8/5 >= (18/17)² >= ((n+1)/n)² for n >= 17",
            q(8, 5) >= pow_q(&q(18, 17), 2),
        ),
        Claim::new(
            "ratio_at_least_8_5",
            "(α+1)/α >= 8/5 on the enclosure",
            *ratio.lo() >= q(8, 5),
        ),
    ];
    Ok(finish_tail(
        SeriesPart::E,
        range,
        alpha,
        constants,
        rows,
        induction,
        Vec::new(),
    ))
}

/// Certifies the (d) tail bound chain for each `n` in `range`:
/// `n + 8 + 3n/200 < 0.104((α+3)/(2α+1))ⁿ`, `(1+3/200)n < 0.01((α+3)/(α+2))ⁿ`,
/// and `1.114(α+3)ⁿ < ((3n-2)/400)(2α+2)ⁿ`, plus the positivity of the
/// `k = n` term that justifies extending the binomial sum.
pub fn tail_bound_part_d(
    range: RangeInclusive<usize>,
    alpha: &RationalInterval,
) -> Result<TailCertificate> {
    check_range(&range)?;
    let a = alpha;
    let am1 = lin(a, 1, -1);
    let one = q(1, 1);
    let le = |x: &RationalInterval, c: BigRational| *x.hi() <= c;
    let ge = |x: &RationalInterval, c: BigRational| *x.lo() >= c;
    let constants = vec![
        Claim::new("alpha_above_one", "α > 1", a.lo() > &one),
        Claim::new(
            "linear_coefficient",
            "(α-1)(25-20α)/10 <= 1/200",
            le(&(&am1 * &lin(a, -20, 25)).scale(&q(1, 10)), q(1, 200)),
        ),
        Claim::new(
            "slope_coefficient",
            "(4/50)(α-1) >= 3/200",
            ge(&am1.scale(&q(4, 50)), q(3, 200)),
        ),
        Claim::new(
            "cubic_factor",
            "α(α-1)(3α-1) <= 1",
            le(&(&(a * &am1) * &lin(a, 3, -1)), one.clone()),
        ),
        Claim::new(
            "quadratic_factor",
            "2α(α-1) <= 1",
            le(&(a * &am1).scale(&q(2, 1)), one.clone()),
        ),
        Claim::new(
            "linear_factor",
            "2(α-1) <= 1",
            le(&am1.scale(&q(2, 1)), one.clone()),
        ),
        Claim::new("alpha_factor", "5α <= 7", le(&a.scale(&q(5, 1)), q(7, 1))),
        Claim::new(
            "shift_factor",
            "(3α-1)/5 <= 1",
            le(&lin(a, 3, -1).scale(&q(1, 5)), one.clone()),
        ),
    ];

    let r1 = lin(a, 1, 3).div(&lin(a, 2, 1))?;
    let r2 = lin(a, 1, 3).div(&lin(a, 1, 2))?;
    let rows: Vec<TailRow> = range
        .clone()
        .into_par_iter()
        .map(|n| {
            let claims = d_row(n, a, &r1, &r2);
            TailRow {
                n,
                pass: claims.iter().all(|c| c.holds),
                claims,
            }
        })
        .collect();

    let b = qi(30);
    let l = |n: BigRational| &n + q(8, 1) + &n * q(3, 200);
    let s = lin(a, 1, 3).div(&lin(a, 2, 2))?;
    let t = a.div(&lin(a, 1, 1))?;
    let base = d_row(30, a, &r1, &r2);
    let base_row = |name: &str| base.iter().any(|c| c.name == name && c.holds);
    let induction = vec![
        Claim::new("aux_linear_base", "n+8+3n/200 < 0.104((α+3)/(2α+1))^n at n = 30", base_row("aux_linear")),
        Claim::new(
            "aux_linear_step",
            "(α+3)/(2α+1) >= L(31)/L(30) >= L(n+1)/L(n) for L(n) = n+8+3n/200, n >= 30",
            *r1.lo() >= l(qi(31)) / l(b.clone()),
        ),
        Claim::new("aux_slope_base", "(1+3/200)n < 0.01((α+3)/(α+2))^n at n = 30", base_row("aux_slope")),
        Claim::new("aux_slope_step", "(α+3)/(α+2) >= 31/30 >= (n+1)/n for n >= 30", *r2.lo() >= q(31, 30)),
        Claim::new("final_base", "1.114(α+3)^n < ((3n-2)/400)(2α+2)^n at n = 30", base_row("final_bound_negative")),
        Claim::new(
            "final_step",
            "(α+3)/(2α+2) < 1, so 1.114((α+3)/(2α+2))^n decreases while (3n-2)/400 increases",
            *s.hi() < q(1, 1),
        ),
        Claim::new("top_term_base", "(α+1)^n(3n-1)/200 > (n+8)α^n + n + 2^n at n = 30", base_row("top_term_positive")),
        Claim::new(
            "top_term_step",
            "(39/38)α/(α+1) < 1, (31/30)/(α+1) < 1 and 2/(α+1) < 1, so every term on the right shrinks relative to (α+1)^n",
            *t.scale(&q(39, 38)).hi() < q(1, 1) && *lin(a, 1, 1).lo() > q(31, 30) && *lin(a, 1, 1).lo() > q(2, 1),
        ),
    ];

    let printed = *r1.pow(30).round_outward(POW_BITS).scale(&q(1, 100)).lo() > qi(30) * q(203, 200);
    let informational = vec![Claim::new(
        "aux_slope_with_ratio_over_2a_plus_1",
        "(1+3/200)n < 0.01((α+3)/(2α+1))^n at n = 30 (the ratio that would appear next to (2α+1)^n)",
        printed,
    )];
    Ok(finish_tail(
        SeriesPart::D,
        range,
        a,
        constants,
        rows,
        induction,
        informational,
    ))
}

fn d_row(
    n: usize,
    a: &RationalInterval,
    r1: &RationalInterval,
    r2: &RationalInterval,
) -> Vec<Claim> {
    let nu = n as u32;
    let nq = qi(n);
    let l1 = &nq + q(8, 1) + &nq * q(3, 200);
    let aux1 = *r1.pow(nu).round_outward(POW_BITS).scale(&q(104, 1000)).lo() > l1;
    let aux2 = *r2.pow(nu).round_outward(POW_BITS).scale(&q(1, 100)).lo() > &nq * q(203, 200);
    let fin = (&lin(a, 1, 3)
        .pow(nu)
        .round_outward(POW_BITS)
        .scale(&q(1114, 1000))
        - &lin(a, 2, 2)
            .pow(nu)
            .round_outward(POW_BITS)
            .scale(&(qi(3 * n - 2) / q(400, 1))))
        .is_negative();
    // (α+1)ⁿ(3n-1)/200 > (n+8)αⁿ + n + 2ⁿ
    let top = lin(a, 1, 1)
        .pow(nu)
        .round_outward(POW_BITS)
        .scale(&(qi(3 * n - 1) / q(200, 1)));
    let rest = &(&a.pow(nu).round_outward(POW_BITS).scale(&(&nq + q(8, 1)))
        + &RationalInterval::point(nq.clone()))
        + &RationalInterval::point(pow_q(&q(2, 1), n));
    let top_positive = (&top - &rest).is_positive();
    let summed = summed_bound_part_d(n, a).is_negative();
    vec![
        Claim::new(
            "aux_linear",
            format!("n+8+3n/200 < 0.104((α+3)/(2α+1))^n at n = {n}"),
            aux1,
        ),
        Claim::new(
            "aux_slope",
            format!("(1+3/200)n < 0.01((α+3)/(α+2))^n at n = {n}"),
            aux2,
        ),
        Claim::new(
            "final_bound_negative",
            format!("1.114(α+3)^n < ((3n-2)/400)(2α+2)^n at n = {n}"),
            fin,
        ),
        Claim::new(
            "top_term_positive",
            format!("(α+1)^n(3n-1)/200 > (n+8)α^n + n + 2^n at n = {n}"),
            top_positive,
        ),
        Claim::new(
            "summed_bound_negative",
            format!("binomial-sum bound for n!d_n is negative at n = {n}"),
            summed,
        ),
    ]
}

/// `(n+8)(2α+1)ⁿ + n(α+2)ⁿ + (α+3)ⁿ + (2α+2)ⁿ/200 - (3n/400)(2α+2)ⁿ +
/// (3n/200)(2α+1)ⁿ + (3n/200)(α+2)ⁿ`, the bound on `n! dₙ` before the
/// auxiliary inequalities are applied.
pub fn summed_bound_part_d(n: usize, alpha: &RationalInterval) -> RationalInterval {
    let nu = n as u32;
    let nq = qi(n);
    let p21 = lin(alpha, 2, 1).pow(nu).round_outward(POW_BITS);
    let p12 = lin(alpha, 1, 2).pow(nu).round_outward(POW_BITS);
    let p13 = lin(alpha, 1, 3).pow(nu).round_outward(POW_BITS);
    let p22 = lin(alpha, 2, 2).pow(nu).round_outward(POW_BITS);
    let three_n_200 = &nq * q(3, 200);
    let mut acc = p21.scale(&(&nq + q(8, 1) + &three_n_200));
    acc = &acc + &p12.scale(&(&nq + &three_n_200));
    acc = &acc + &p13;
    acc = &acc + &p22.scale(&(q(1, 200) - &nq * q(3, 400)));
    acc
}

/// Settings for [`certify_series`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesConfig {
    /// Last order checked, both directly and through the tail bound.
    pub nmax: usize,
    /// Width of the α* enclosure, as a decimal or fraction string.
    pub enclosure_width: String,
    /// Retry once at the squared width when a coefficient is indeterminate.
    pub refine: bool,
    /// Use this enclosure instead of one around α*.
    #[serde(skip)]
    pub enclosure: Option<RationalInterval>,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            nmax: 200,
            enclosure_width: DEFAULT_ENCLOSURE_WIDTH.into(),
            refine: true,
            enclosure: None,
        }
    }
}

/// Everything certified about one boundary inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesCertificateRun {
    pub part: SeriesPart,
    pub nmax: usize,
    pub enclosure_width: String,
    pub refined: bool,
    pub pattern: SignCertificate,
    pub tail: TailCertificate,
    /// Orders past the pattern whose coefficient is not certified negative
    /// by direct evaluation.
    pub direct_tail_failures: Vec<usize>,
    /// `None` when the inputs were not certified.
    pub conclusion: Option<bool>,
    pub pass: bool,
}

fn enclosure_for(width: &BigRational) -> Result<RationalInterval> {
    alpha_star(width)
}

/// Builds the series, certifies its sign pattern and tail, and combines them
/// into the nonnegativity conclusion.
pub fn certify_series(part: SeriesPart, cfg: &SeriesConfig) -> Result<SeriesCertificateRun> {
    let pattern = part.pattern();
    let last = pattern.last_index().unwrap_or(0);
    if cfg.nmax < part.tail_start() {
        return Err(invalid(format!(
            "nmax must be at least {} for part ({})",
            part.tail_start(),
            part.label()
        )));
    }
    let width = parse_rational(&cfg.enclosure_width)?;
    if !width.is_positive() {
        return Err(invalid("enclosure width must be positive"));
    }
    let series = part.series(cfg.nmax)?;
    let mut enclosure = match &cfg.enclosure {
        Some(e) => e.clone(),
        None => enclosure_for(&width)?,
    };
    let mut width_used = cfg.enclosure_width.clone();
    let mut signs = check_sign_pattern(&series, &enclosure, &pattern)?;
    let mut refined = false;
    if cfg.refine && cfg.enclosure.is_none() && !signs.indeterminate.is_empty() {
        let finer = &width * &width;
        enclosure = enclosure_for(&finer)?;
        width_used = rational_string(&finer);
        signs = check_sign_pattern(&series, &enclosure, &pattern)?;
        refined = true;
    }
    let tail = match part {
        SeriesPart::D => tail_bound_part_d(part.tail_start()..=cfg.nmax, &enclosure)?,
        SeriesPart::E => tail_bound_part_e(part.tail_start()..=cfg.nmax, &enclosure)?,
    };
    let direct_tail_failures: Vec<usize> = ((last + 1)..=cfg.nmax)
        .into_par_iter()
        .filter(|&n| {
            coefficient_sign(series.coefficient(n), &enclosure).0 != ObservedSign::Negative
        })
        .collect();
    let conclusion = sign_change_conclusion(&signs, tail.closed_for_all_n, &part.endpoints()).ok();
    let pass = signs.pass
        && tail.pass
        && tail.closed_for_all_n
        && direct_tail_failures.is_empty()
        && conclusion == Some(true);
    Ok(SeriesCertificateRun {
        part,
        nmax: cfg.nmax,
        enclosure_width: width_used,
        refined,
        pattern: signs,
        tail,
        direct_tail_failures,
        conclusion,
        pass,
    })
}

impl SeriesCertificateRun {
    /// Flattens the run into report checks, one case per coefficient or claim.
    pub fn to_report(&self, duration_ms: u64) -> VerificationReport {
        let p = self.part.label();
        let mut rb = ReportBuilder::new(
            "certify",
            json!({ "part": p, "nmax": self.nmax, "enclosure_width": self.enclosure_width, "refined": self.refined }),
        );
        let id = rb.check(
            format!("{p}_sign_pattern"),
            "coefficients follow the expected sign pattern",
            0.0,
        );
        for e in &self.pattern.entries {
            let input = json!({
                "n": e.n,
                "expected": e.expected,
                "observed": e.observed,
                "zero_polynomial": e.zero_polynomial,
                "scaled_interval": e.scaled_interval,
            });
            rb.record_bool(id, input, e.certified);
        }
        let id = rb.check(
            format!("{p}_tail_constants"),
            "facts about α used by the tail bound",
            0.0,
        );
        for c in &self.tail.constants {
            rb.record_bool(
                id,
                json!({ "claim": c.name, "statement": c.statement }),
                c.holds,
            );
        }
        let id = rb.check(
            format!("{p}_tail_bound"),
            "explicit tail bound is negative",
            0.0,
        );
        for r in &self.tail.rows {
            let failed: Vec<&str> = r
                .claims
                .iter()
                .filter(|c| !c.holds)
                .map(|c| c.name.as_str())
                .collect();
            rb.record_bool(id, json!({ "n": r.n, "failed_claims": failed }), r.pass);
        }
        let id = rb.check(
            format!("{p}_tail_induction"),
            "tail bound holds for every larger n",
            0.0,
        );
        for c in &self.tail.induction {
            rb.record_bool(
                id,
                json!({ "claim": c.name, "statement": c.statement }),
                c.holds,
            );
        }
        let id = rb.check(
            format!("{p}_direct_tail"),
            "coefficients past the pattern are negative",
            0.0,
        );
        let first = self.pattern.entries.last().map_or(0, |e| e.n + 1);
        rb.record_bool(
            id,
            json!({ "first": first, "last": self.nmax, "failures": self.direct_tail_failures }),
            self.direct_tail_failures.is_empty(),
        );
        let id = rb.check(
            format!("{p}_conclusion"),
            "one sign change and nonnegative endpoints",
            0.0,
        );
        rb.record_bool(
            id,
            json!({ "conclusion": self.conclusion }),
            self.conclusion == Some(true),
        );
        let mut r = rb.finish(duration_ms);
        let mut blocks: Vec<serde_json::Value> = self
            .part
            .pattern()
            .blocks()
            .iter()
            .map(|&(lo, hi, sign)| json!({ "first": lo, "last": hi, "sign": sign, "method": "direct" }))
            .collect();
        blocks.push(json!({
            "first": self.part.tail_start(),
            "last": self.nmax,
            "sign": ExpectedSign::Negative,
            "method": "tail_bound",
        }));
        r.config["sign_blocks"] = json!(blocks);
        r.config["informational"] = json!(self.tail.informational);
        r
    }
}

/// Runs [`certify_series`] and times it.
pub fn certify_series_report(
    part: SeriesPart,
    cfg: &SeriesConfig,
) -> Result<(SeriesCertificateRun, VerificationReport)> {
    let start = Instant::now();
    let run = certify_series(part, cfg)?;
    let report = run.to_report(start.elapsed().as_millis() as u64);
    Ok((run, report))
}
