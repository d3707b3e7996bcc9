//! Command-line surface of `lc-renyi`.
//!
//! [`run`] parses arguments, executes one command and writes its result as
//! JSON or CSV. The return value is the process exit code: 0 when every check
//! passes, 1 when a check fails, 2 for unusable input and 3 when a size or
//! grid budget runs out.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lc_renyi::bounds::{alpha_star, theorem_slack, BoundSpec, Regime};
use lc_renyi::certificates::{certify_series_report, SeriesConfig, SeriesPart};
use lc_renyi::convolution::GridConfig as ConvolutionGrid;
use lc_renyi::density::{
    DensitySpec, PiecewiseLogLinearDensity, PiecewiseOptions, DEFAULT_TRUNCATION_MASS,
};
use lc_renyi::epi::{
    constants_row, difference_entropy_checks, relative_alpha_entropy, relative_check,
    reverse_epi_checks,
};
use lc_renyi::gfunction::{verify_g_signs, GridConfig as LemmaGrid, LemmaPart};
use lc_renyi::interval::{decimal_string, parse_rational, rational_string};
use lc_renyi::report::{ReportBuilder, VerificationReport, SCHEMA};
use lc_renyi::sweeps::{
    verify_difference, verify_monotonicity, verify_relative, verify_reverse_epi, verify_sandwich,
    verify_theorem, DifferenceSweep, EpiSweep, MonotonicitySweep, RelativeSweep, SandwichSweep,
    TheoremSweep,
};
use lc_renyi::{entropy_power, renyi_entropy, EntropyOrder};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Library(#[from] lc_renyi::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(
                lc_renyi::Error::BudgetExceeded(_) | lc_renyi::Error::GridBudget { .. },
            ) => EXIT_BUDGET,
            CliError::Io(_) => EXIT_FAIL,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "lc-renyi",
    version,
    about = "Rényi entropy versus variance for log-concave densities"
)]
pub struct Cli {
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact rational enclosure of α*, the root > 1 of 2 log α = (α - 1) log 6.
    AlphaStar {
        /// Largest admissible width, as a decimal or fraction.
        #[arg(long, default_value = "1e-12")]
        width: String,
    },
    /// Lower bound h_α ≥ ½ log var + c(α); with a density, also its slack.
    Bound {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value = "symmetric", value_parser = parse_regime)]
        regime: Regime,
        #[arg(long, default_value_t = 1.0)]
        variance: f64,
        #[command(flatten)]
        density: DensityArgs,
        /// Allowed negative slack when a density is given.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Sandwich constants C₋(α), C₊(α) and the relative-entropy constant C(α).
    Constants {
        #[arg(long, value_delimiter = ',', default_value = "1.1,1.2,1.5,2,3,5,10")]
        alphas: Vec<f64>,
    },
    /// Rényi entropies and entropy powers of one density.
    Entropy {
        #[command(flatten)]
        density: DensityArgs,
        /// Orders; `0`, `1` and `inf` select the limit orders.
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,inf")]
        alphas: Vec<String>,
    },
    /// Sweep of h_α ≥ ½ log var + c(α) over sampled log-concave densities.
    VerifyTheorem {
        #[arg(long, default_value = "symmetric", value_parser = parse_regime)]
        regime: Regime,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Defaults to 0.5,1,1.2,α*∓0.01,1.5,2,5,50 (symmetric) or 2,3,10 (general).
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_knots: usize,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Derivative checks on G(a, b, α) and exact certificates for the boundary series.
    Certify(CertifyArgs),
    /// Reverse entropy power inequality: one pair, one difference X - Y, or a sampled sweep.
    EpiCheck(EpiArgs),
    /// Relative α-entropy against the matched generalized Gaussian.
    RelativeCheck {
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Segments of the generalized Gaussian.
        #[arg(long, default_value_t = 10_000)]
        gg_resolution: usize,
    },
    /// Batch sweeps; `constants` tabulates C₋, C₊, C over an α grid.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepKind::All)]
        kind: SweepKind,
        /// Overrides the per-kind default sample count.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.05)]
        alpha_min: f64,
        #[arg(long, default_value_t = 10.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 100)]
        alpha_steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Theorem,
    Monotonicity,
    Sandwich,
    Epi,
    Difference,
    Relative,
    Constants,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartArg {
    A,
    B,
    C,
    D,
    E,
    Chain,
    All,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, value_enum, default_value_t = PartArg::All)]
    pub part: PartArg,
    /// Last Taylor order certified for parts d and e.
    #[arg(long, default_value_t = 200)]
    pub nmax: usize,
    #[arg(long, default_value = "1e-30")]
    pub enclosure_width: String,
    /// Test another order instead of α* (grid checks only).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 10.0)]
    pub b_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Stand-in for a → ∞.
    #[arg(long, default_value_t = 1e4)]
    pub large_a: f64,
}

#[derive(Debug, Args)]
pub struct EpiArgs {
    /// First density; without it a sampled sweep runs.
    #[command(flatten)]
    pub x: DensityArgs,
    /// Second density (JSON); without it the check is on X - Y for i.i.d. X, Y.
    #[arg(long)]
    pub density_y: Option<String>,
    #[arg(long)]
    pub density_y_file: Option<PathBuf>,
    #[arg(long, default_value = "symmetric", value_parser = parse_regime)]
    pub regime: Regime,
    /// Defaults to 1.5,2 (symmetric) or 2 (general and difference checks).
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 500)]
    pub pairs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1 << 12)]
    pub min_cells: usize,
    #[arg(long, default_value_t = 1 << 20)]
    pub max_points: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub grid_tolerance: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Density as JSON, e.g. '{"type":"uniform","halfwidth":1}'.
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long)]
    pub density_file: Option<PathBuf>,
    /// Segments for families without a piecewise-linear potential.
    #[arg(long, default_value_t = 10_000)]
    pub resolution: usize,
    /// Tail mass cut from unbounded families.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION_MASS)]
    pub truncation_mass: f64,
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse().map_err(|e: lc_renyi::Error| e.to_string())
}

fn read_spec(inline: Option<&str>, file: Option<&Path>) -> CliResult<Option<DensitySpec>> {
    let text = match (inline, file) {
        (Some(_), Some(_)) => return Err(usage("give a density inline or from a file, not both")),
        (Some(s), None) => s.to_string(),
        (None, Some(p)) => {
            fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?
        }
        (None, None) => return Ok(None),
    };
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| usage(format!("bad density JSON: {e}")))
}

impl DensityArgs {
    fn options(&self) -> PiecewiseOptions {
        PiecewiseOptions {
            resolution: self.resolution,
            truncation_mass: Some(self.truncation_mass),
        }
    }

    fn load(&self) -> CliResult<Option<(DensitySpec, PiecewiseLogLinearDensity)>> {
        match read_spec(self.density.as_deref(), self.density_file.as_deref())? {
            None => Ok(None),
            Some(spec) => {
                let f = spec.to_piecewise(&self.options())?;
                Ok(Some((spec, f)))
            }
        }
    }
}

/// Result of one command before formatting.
enum Output {
    Report(VerificationReport),
    Value {
        value: Value,
        pass: bool,
    },
    Table {
        header: Vec<&'static str>,
        rows: Vec<Vec<f64>>,
    },
}

impl Output {
    fn pass(&self) -> bool {
        match self {
            Output::Report(r) => r.pass,
            Output::Value { pass, .. } => *pass,
            Output::Table { .. } => true,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
///
/// Results go to `out` (or the `--out` file); diagnostics go to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            if code == EXIT_PASS {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli).and_then(|o| emit(&cli, &o, out).map(|_| o.pass())) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> CliResult<Output> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| usage(format!("cannot start {} worker threads: {e}", cli.jobs)))?;
    pool.install(|| dispatch(&cli.command))
}

fn dispatch(cmd: &Command) -> CliResult<Output> {
    match cmd {
        Command::AlphaStar { width } => alpha_star_cmd(width),
        Command::Bound {
            alpha,
            regime,
            variance,
            density,
            tolerance,
        } => bound_cmd(*alpha, *regime, *variance, density, *tolerance),
        Command::Constants { alphas } => constants_table(alphas),
        Command::Entropy { density, alphas } => entropy_cmd(density, alphas),
        Command::VerifyTheorem {
            regime,
            samples,
            alphas,
            seed,
            max_knots,
            tolerance,
        } => {
            let mut cfg = match regime {
                Regime::Symmetric => TheoremSweep::symmetric(*seed, *samples),
                Regime::General => TheoremSweep::general(*seed, *samples),
            };
            if let Some(a) = alphas {
                cfg.alphas = a.clone();
            }
            cfg.sampling.max_knots = *max_knots;
            cfg.tolerance = *tolerance;
            Ok(Output::Report(verify_theorem(&cfg)?))
        }
        Command::Certify(args) => certify_cmd(args),
        Command::EpiCheck(args) => epi_cmd(args),
        Command::RelativeCheck {
            density,
            alphas,
            samples,
            seed,
            gg_resolution,
        } => relative_cmd(density, alphas, *samples, *seed, *gg_resolution),
        Command::Sweep {
            kind,
            samples,
            seed,
            alpha_min,
            alpha_max,
            alpha_steps,
        } => sweep_cmd(*kind, *samples, *seed, *alpha_min, *alpha_max, *alpha_steps),
    }
}

fn alpha_star_cmd(width: &str) -> CliResult<Output> {
    let w = parse_rational(width)?;
    let enc = alpha_star(&w)?;
    let mid = enc.mid_f64();
    let residual = (2.0 * mid.ln() - (mid - 1.0) * 6f64.ln()).abs();
    let digits = (-(enc.width_f64().max(1e-300)).log10()).ceil().max(0.0) as usize + 3;
    let value = json!({
        "schema": SCHEMA,
        "command": "alpha-star",
        "width_bound": rational_string(&w),
        "lo": rational_string(enc.lo()),
        "hi": rational_string(enc.hi()),
        "mid_decimal": decimal_string(&enc.mid(), digits.min(60)),
        "width": enc.width_f64(),
        "residual_at_mid": residual,
    });
    Ok(Output::Value {
        value,
        pass: enc.width() <= w,
    })
}

fn bound_cmd(
    alpha: f64,
    regime: Regime,
    variance: f64,
    density: &DensityArgs,
    tol: f64,
) -> CliResult<Output> {
    match density.load()? {
        None => {
            let b = BoundSpec::new(alpha, regime, variance)?;
            Ok(Output::Value {
                value: json!({ "schema": SCHEMA, "command": "bound", "bound": b }),
                pass: true,
            })
        }
        Some((spec, f)) => {
            let b = BoundSpec::new(alpha, regime, f.variance())?;
            let slack = theorem_slack(&f, alpha, regime)?;
            let h = renyi_entropy(&f, EntropyOrder::new(alpha)?);
            let value = json!({
                "schema": SCHEMA,
                "command": "bound",
                "density": spec,
                "bound": b,
                "entropy": h,
                "slack": slack,
                "tolerance": tol,
            });
            Ok(Output::Value {
                value,
                pass: slack >= -tol,
            })
        }
    }
}

fn constants_table(alphas: &[f64]) -> CliResult<Output> {
    let rows = alphas
        .iter()
        .map(|&a| constants_row(a).map(|r| vec![r.alpha, r.c_minus, r.c_plus, r.c_alpha]))
        .collect::<lc_renyi::Result<Vec<_>>>()?;
    Ok(Output::Table {
        header: vec!["alpha", "c_minus", "c_plus", "c_alpha"],
        rows,
    })
}

fn entropy_cmd(density: &DensityArgs, alphas: &[String]) -> CliResult<Output> {
    let (spec, f) = density
        .load()?
        .ok_or_else(|| usage("entropy needs --density or --density-file"))?;
    let named = spec.named();
    let mut entries = Vec::new();
    for a in alphas {
        let order: EntropyOrder = a.parse()?;
        let mut e = json!({
            "alpha": order.to_string(),
            "entropy": renyi_entropy(&f, order),
            "entropy_power": entropy_power(&f, order),
        });
        if let Some(n) = named {
            e["closed_form"] = json!(n.renyi_entropy(order));
        }
        entries.push(e);
    }
    let value = json!({
        "schema": SCHEMA,
        "command": "entropy",
        "density": spec,
        "segments": f.num_segments(),
        "mean": f.mean(),
        "variance": f.variance(),
        "entries": entries,
    });
    Ok(Output::Value { value, pass: true })
}

fn certify_cmd(args: &CertifyArgs) -> CliResult<Output> {
    let grid = LemmaGrid {
        a_max: args.a_max,
        b_max: args.b_max,
        step: args.step,
        large_a: args.large_a,
        decay_a: 10.0 * args.large_a,
        alpha: args.alpha,
        ..LemmaGrid::default()
    };
    let (parts, series): (Vec<LemmaPart>, Vec<SeriesPart>) = match args.part {
        PartArg::A => (vec![LemmaPart::A], vec![]),
        PartArg::B => (vec![LemmaPart::B], vec![]),
        PartArg::C => (vec![LemmaPart::C], vec![]),
        PartArg::D => (vec![LemmaPart::D], vec![SeriesPart::D]),
        PartArg::E => (vec![LemmaPart::E], vec![SeriesPart::E]),
        PartArg::Chain => (vec![LemmaPart::Chain], vec![]),
        PartArg::All => (LemmaPart::ALL.to_vec(), vec![SeriesPart::D, SeriesPart::E]),
    };
    let mut report = verify_g_signs(&grid, &parts)?;
    // the series certificates are about α* itself
    if args.alpha.is_none() {
        let cfg = SeriesConfig {
            nmax: args.nmax,
            enclosure_width: args.enclosure_width.clone(),
            ..SeriesConfig::default()
        };
        for part in series {
            let (_, r) = certify_series_report(part, &cfg)?;
            let label = format!("series_{}", r.config["part"].as_str().unwrap_or("?"));
            report.config[label] = r.config.clone();
            report.absorb(r);
        }
    }
    Ok(Output::Report(report))
}

fn epi_cmd(args: &EpiArgs) -> CliResult<Output> {
    let grid = ConvolutionGrid {
        min_cells: args.min_cells,
        max_points: args.max_points,
        tolerance: args.grid_tolerance,
    };
    let x = args.x.load()?;
    let y = read_spec(args.density_y.as_deref(), args.density_y_file.as_deref())?;
    let start = Instant::now();
    match (x, y) {
        (None, Some(_)) => Err(usage("--density-y needs a first density")),
        (None, None) => {
            let mut cfg = EpiSweep::new(args.seed, args.pairs);
            cfg.grid = grid;
            cfg.tolerance = args.tolerance;
            match args.regime {
                Regime::Symmetric => {
                    cfg.symmetric_alphas = args.alphas.clone().unwrap_or(cfg.symmetric_alphas);
                    cfg.general_alphas.clear();
                }
                Regime::General => {
                    cfg.general_alphas = args.alphas.clone().unwrap_or(cfg.general_alphas);
                    cfg.symmetric_alphas.clear();
                }
            }
            Ok(Output::Report(verify_reverse_epi(&cfg)?))
        }
        (Some((sx, fx)), Some(sy)) => {
            let fy = sy.to_piecewise(&args.x.options())?;
            let alphas = args.alphas.clone().unwrap_or_else(|| match args.regime {
                Regime::Symmetric => vec![1.5, 2.0],
                Regime::General => vec![2.0],
            });
            let rs = reverse_epi_checks(&fx, &fy, &alphas, args.regime, &grid)?;
            let mut rb = ReportBuilder::new(
                "epi-check",
                json!({ "x": sx, "y": sy, "regime": args.regime, "alphas": alphas, "grid": grid }),
            );
            let id = rb.check(
                "reverse_epi",
                "N_α(X+Y) ≤ cap (N_α(X) + N_α(Y))",
                args.tolerance,
            );
            for r in rs {
                let input = serde_json::to_value(&r).expect("serializable");
                rb.record(id, input, r.ratio, r.slack);
            }
            Ok(Output::Report(
                rb.finish(start.elapsed().as_millis() as u64),
            ))
        }
        (Some((sx, fx)), None) => {
            let alphas = args.alphas.clone().unwrap_or_else(|| vec![2.0]);
            let ds = difference_entropy_checks(&fx, &alphas, &grid)?;
            let mut rb = ReportBuilder::new(
                "epi-check",
                json!({ "x": sx, "difference": true, "alphas": alphas, "grid": grid }),
            );
            let id = rb.check(
                "difference_entropy",
                "h_α(X - Y) ≤ h_α(X) + log 2",
                args.tolerance,
            );
            for d in ds {
                let input = serde_json::to_value(d).expect("serializable");
                rb.record(id, input, d.difference_entropy, d.slack);
            }
            Ok(Output::Report(
                rb.finish(start.elapsed().as_millis() as u64),
            ))
        }
    }
}

fn relative_cmd(
    density: &DensityArgs,
    alphas: &[f64],
    samples: usize,
    seed: u64,
    res: usize,
) -> CliResult<Output> {
    let start = Instant::now();
    match density.load()? {
        None => {
            let mut cfg = RelativeSweep::new(seed, samples);
            cfg.alphas = alphas.to_vec();
            cfg.resolution = res;
            Ok(Output::Report(verify_relative(&cfg)?))
        }
        Some((spec, f)) => {
            let cfg = RelativeSweep::new(seed, 1);
            let mut rb = ReportBuilder::new(
                "relative-check",
                json!({ "density": spec, "alphas": alphas, "gg_resolution": res }),
            );
            let own = rb.check("self_relative_zero", "I_α(X‖X) = 0", cfg.self_tolerance);
            let gap = rb.check(
                "entropy_gap_bound",
                "I_α(X‖Z) ≤ h_α(Z) - h_α(X)",
                cfg.gap_tolerance,
            );
            let bound = rb.check("constant_bound", "I_α(X‖Z) ≤ C(α)", cfg.constant_tolerance);
            for &a in alphas {
                let i0 = relative_alpha_entropy(&f, &f, a)?;
                rb.record(own, json!({ "alpha": a }), i0, -i0.abs());
                let r = relative_check(&f, a, res)?;
                let input = serde_json::to_value(r).expect("serializable");
                rb.record(gap, input.clone(), r.relative, r.gap_slack);
                rb.record(bound, input, r.relative, r.constant_slack);
            }
            Ok(Output::Report(
                rb.finish(start.elapsed().as_millis() as u64),
            ))
        }
    }
}

fn sweep_cmd(
    kind: SweepKind,
    samples: Option<usize>,
    seed: u64,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
) -> CliResult<Output> {
    let n = |default: usize| samples.unwrap_or(default);
    let one = |k: SweepKind| -> CliResult<VerificationReport> {
        Ok(match k {
            SweepKind::Theorem => {
                let mut r = verify_theorem(&TheoremSweep::symmetric(seed, n(1000)))?;
                let g = verify_theorem(&TheoremSweep::general(seed, n(1000)))?;
                rename_checks(&mut r, "symmetric_");
                let mut g = g;
                rename_checks(&mut g, "general_");
                r.absorb(g);
                r
            }
            SweepKind::Monotonicity => verify_monotonicity(&MonotonicitySweep::new(seed, n(200)))?,
            SweepKind::Sandwich => verify_sandwich(&SandwichSweep::new(seed, n(500)))?,
            SweepKind::Epi => verify_reverse_epi(&EpiSweep::new(seed, n(500)))?,
            SweepKind::Difference => verify_difference(&DifferenceSweep::new(seed, n(200)))?,
            SweepKind::Relative => verify_relative(&RelativeSweep::new(seed, n(200)))?,
            SweepKind::Constants | SweepKind::All => unreachable!("handled by the caller"),
        })
    };
    match kind {
        SweepKind::Constants => {
            if !(alpha_min > 1.0 && alpha_max >= alpha_min && steps >= 1) {
                return Err(usage(
                    "constants sweep needs 1 < alpha-min ≤ alpha-max and at least one step",
                ));
            }
            let alphas: Vec<f64> = if steps == 1 {
                vec![alpha_min]
            } else {
                (0..steps)
                    .map(|i| alpha_min + (alpha_max - alpha_min) * i as f64 / (steps - 1) as f64)
                    .collect()
            };
            constants_table(&alphas)
        }
        SweepKind::All => {
            let mut kinds = [
                SweepKind::Theorem,
                SweepKind::Monotonicity,
                SweepKind::Sandwich,
                SweepKind::Epi,
                SweepKind::Difference,
                SweepKind::Relative,
            ]
            .into_iter();
            let mut report = one(kinds.next().expect("nonempty"))?;
            report.command = "sweep".into();
            report.config = json!({ "kind": "all", "seed": seed, "samples": samples });
            for k in kinds {
                report.absorb(one(k)?);
            }
            Ok(Output::Report(report))
        }
        k => Ok(Output::Report(one(k)?)),
    }
}

fn rename_checks(r: &mut VerificationReport, prefix: &str) {
    for c in &mut r.checks {
        c.name = format!("{prefix}{}", c.name);
        if let Some(w) = &mut c.worst {
            w.check = c.name.clone();
        }
    }
    for c in &mut r.cases {
        c.check = format!("{prefix}{}", c.check);
    }
    if let Some(w) = &mut r.worst {
        w.check = format!("{prefix}{}", w.check);
    }
}

fn emit(cli: &Cli, output: &Output, stdout: &mut dyn Write) -> CliResult<()> {
    let text = match cli.format {
        Format::Json => to_json(output),
        Format::Csv => to_csv(output)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json(output: &Output) -> String {
    let mut s = match output {
        Output::Report(r) => serde_json::to_string_pretty(r),
        Output::Value { value, .. } => serde_json::to_string_pretty(value),
        Output::Table { header, rows } => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    Value::Object(
                        header
                            .iter()
                            .zip(r)
                            .map(|(h, v)| (h.to_string(), json!(v)))
                            .collect(),
                    )
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "schema": SCHEMA, "rows": rows }))
        }
    }
    .expect("JSON values serialize");
    s.push('\n');
    s
}

/// `x` with 12 significant digits, in positional notation where practical.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        format!("{:.*}", (11 - mag).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn to_csv(output: &Output) -> CliResult<String> {
    let mut w = csv_writer();
    match output {
        Output::Table { header, rows } => {
            w.write_record(header).map_err(csv_err)?;
            for r in rows {
                w.write_record(r.iter().map(|v| sig12(*v)))
                    .map_err(csv_err)?;
            }
        }
        Output::Report(r) => {
            w.write_record([
                "check",
                "index",
                "value",
                "slack",
                "tolerance",
                "pass",
                "input",
            ])
            .map_err(csv_err)?;
            for c in &r.cases {
                w.write_record([
                    c.check.clone(),
                    c.index.to_string(),
                    sig12(c.value),
                    sig12(c.slack),
                    sig12(c.tolerance),
                    c.pass.to_string(),
                    c.input.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        Output::Value { value, .. } => {
            let obj = value.as_object().cloned().unwrap_or_default();
            w.write_record(obj.keys()).map_err(csv_err)?;
            w.write_record(obj.values().map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }))
            .map_err(csv_err)?;
        }
    }
    finish_csv(w)
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
