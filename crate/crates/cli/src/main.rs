//! `yukawa`: batch tables and scans over the yukawa-core library.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid flags, 3 numerical failure.

mod config;

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use yukawa_core::dipole;
use yukawa_core::energy::{self, random_configuration};
use yukawa_core::majorant::{self, cn_system, collapse_scan, radius_estimate, tau_k};
use yukawa_core::potentials::{self, euclid_hat, mixture_g, mixture_m, standard_kernel, M_ORIGIN_COEFF};
use yukawa_core::specfun::{self, k0, k1, lambert_w0};
use yukawa_core::ursell::{self, ursell_flow, ursell_graph_sum};
use yukawa_core::{
    FlowContext, KernelKind, MajorantParams, OdeGridSpec, RngStream, ScaleWindow, ScanReport, ThresholdLadder, Variant,
};

#[derive(Debug, Parser)]
#[command(name = "yukawa", version, about = "Tables and scans for the two-dimensional Yukawa gas")]
#[command(args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Relative tolerance for pass/fail columns.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kernel {
    Hat,
    Standard,
}

impl From<Kernel> for KernelKind {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::Hat => KernelKind::EuclidHat,
            Kernel::Standard => KernelKind::StandardBessel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Plain,
    Lagrange,
    Improved,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Lagrange => Variant::Lagrange,
            VariantArg::Improved => Variant::Improved,
        }
    }
}

/// Comma-separated list given as one flag value, so a later occurrence
/// replaces an earlier one.
#[derive(Debug, Clone, PartialEq)]
struct List(Vec<f64>);

fn parse_list(s: &str) -> Result<List, String> {
    let values: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if !v.is_empty() => Ok(List(v)),
        Ok(_) => Err("empty list".into()),
        Err(e) => Err(format!("`{s}`: {e}")),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// K0, K1, p and the principal Lambert W on a grid.
    SpecfunTable {
        #[arg(long, default_value_t = 0.01)]
        x_min: f64,
        #[arg(long, default_value_t = 20.0)]
        x_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Linear instead of logarithmic spacing.
        #[arg(long)]
        linear: bool,
    },
    /// Kernels, mixture density and its envelopes on a logarithmic grid.
    KernelTable {
        #[arg(long, default_value_t = 0.01)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Minimal three-particle specific energy of the standard kernel.
    Ebar3,
    /// Margin of the superadditivity inequality at constant `c`.
    Superadd {
        #[arg(long, default_value_t = 1.061)]
        c: f64,
        #[arg(long, default_value_t = 6.0)]
        grid_max: f64,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
    },
    /// Random-configuration scan of the energy lower bound.
    EnergyBoundScan {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Half-width of the square positions are drawn from.
        #[arg(long = "box", default_value_t = 1.0)]
        half_width: f64,
        #[arg(long, value_enum, default_value_t = Kernel::Hat)]
        kernel: Kernel,
    },
    /// Ursell flow against the connected-graph sum on random configurations.
    UrsellCompare {
        #[arg(long, default_value_t = 50)]
        configs: usize,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.01)]
        t0: f64,
        #[arg(long, default_value_t = 2.0)]
        t1: f64,
        #[arg(long = "box", default_value_t = 0.5)]
        half_width: f64,
        #[arg(long, value_enum, default_value_t = Kernel::Hat)]
        kernel: Kernel,
        #[arg(long, default_value_t = 200)]
        steps_per_decade: usize,
        /// Re-solve at doubled resolution and fail on disagreement.
        #[arg(long)]
        richardson: bool,
    },
    /// tau_k and the radius bound 1/(e tau_k) over beta and t0.
    MajorantRadius {
        #[arg(long, value_parser = parse_list, default_value = "12.566370614359172,15.707963267948966")]
        beta: List,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, value_parser = parse_list, default_value = "0.01,0.001,0.0001")]
        t0: List,
    },
    /// Coefficient trajectory C_1..C_N of the majorant system.
    CnFlow {
        #[arg(long, default_value_t = 5.0 * PI)]
        beta: f64,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 0.01)]
        t0: f64,
        /// Upper scale; unbounded when omitted.
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long, value_enum, default_value_t = VariantArg::Lagrange)]
        variant: VariantArg,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        steps_per_decade: usize,
        /// Re-solve at doubled resolution and fail on disagreement.
        #[arg(long)]
        richardson: bool,
        /// Keep every `stride`-th grid point.
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Fitted small-delta exponent of neutral 2r-cluster weights.
    ThresholdScan {
        #[arg(long, value_parser = parse_list, default_value = "9.42477796076938,12.566370614359172,15.707963267948966")]
        beta: List,
        #[arg(long, value_parser = parse_list, default_value = "1,2")]
        r: List,
        #[arg(long, value_parser = parse_list, default_value = "1e-2,1e-3,1e-4,1e-5,1e-6")]
        deltas: List,
    },
    /// Pair bound ladder, Monte Carlo shell mass and refined exponents.
    DipoleScan {
        #[arg(long, value_parser = parse_list, default_value = "15.707963267948966,21.991148575128552")]
        beta: List,
        #[arg(long, value_parser = parse_list, default_value = "0.01,0.001,0.0001,0.00001")]
        t0: List,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 0.5)]
        s_tilde: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
}

const SUBCOMMANDS: [&str; 10] = [
    "specfun-table",
    "kernel-table",
    "ebar3",
    "superadd",
    "energy-bound-scan",
    "ursell-compare",
    "majorant-radius",
    "cn-flow",
    "threshold-scan",
    "dipole-scan",
];

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(yukawa_core::Error),
    Io(String),
}

impl From<yukawa_core::Error> for Failure {
    fn from(e: yukawa_core::Error) -> Self {
        Failure::Numerical(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "invalid arguments: {m}"),
            Failure::Numerical(e) => write!(f, "numerical failure: {e}"),
            Failure::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

fn usage(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure::Usage(msg()))
    }
}

/// Maps errors raised while building parameters to usage failures.
fn checked<T>(r: yukawa_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::config_path(&argv) {
        None => argv,
        Some(path) => match config::load(path.as_ref()).and_then(|m| config::to_flags(&m)) {
            Ok(flags) => config::splice(&argv, flags, &SUBCOMMANDS),
            Err(msg) => {
                eprintln!("invalid arguments: {msg}");
                return ExitCode::from(2);
            }
        },
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    usage(common.tol > 0.0 && common.tol.is_finite(), || format!("--tol must be positive, got {}", common.tol))?;
    let (report, default_format) = match &cli.command {
        Command::SpecfunTable {
            x_min,
            x_max,
            points,
            linear,
        } => (specfun_table(*x_min, *x_max, *points, *linear)?, Format::Csv),
        Command::KernelTable { x_min, x_max, points } => (kernel_table(*x_min, *x_max, *points)?, Format::Csv),
        Command::Ebar3 => (ebar3()?, Format::Json),
        Command::Superadd { c, grid_max, grid_step } => (superadd(*c, *grid_max, *grid_step)?, Format::Json),
        Command::EnergyBoundScan {
            n_max,
            samples,
            half_width,
            kernel,
        } => (energy_bound_scan(*n_max, *samples, *half_width, *kernel, common.seed)?, Format::Json),
        Command::UrsellCompare {
            configs,
            n_min,
            n_max,
            beta,
            t0,
            t1,
            half_width,
            kernel,
            steps_per_decade,
            richardson,
        } => {
            let window = checked(ScaleWindow::new(*t0, *t1))?;
            let grid = checked(OdeGridSpec::new(*steps_per_decade, *richardson))?;
            let scan = UrsellScan {
                configs: *configs,
                n_min: *n_min,
                n_max: *n_max,
                beta: *beta,
                window,
                half_width: *half_width,
                kind: (*kernel).into(),
                grid,
            };
            (ursell_compare(&scan, common.seed, common.tol)?, Format::Csv)
        }
        Command::MajorantRadius { beta, k, t0 } => (majorant_radius(&beta.0, *k, &t0.0)?, Format::Csv),
        Command::CnFlow {
            beta,
            k,
            t0,
            t1,
            variant,
            n_max,
            steps_per_decade,
            richardson,
            stride,
        } => {
            let window = checked(match t1 {
                Some(t1) => ScaleWindow::new(*t0, *t1),
                None => ScaleWindow::to_infinity(*t0),
            })?;
            let mut params = MajorantParams::new(*beta, *k, window, (*variant).into());
            params.n_max = *n_max;
            checked(params.validate())?;
            let grid = checked(OdeGridSpec::new(*steps_per_decade, *richardson))?;
            usage(*stride >= 1, || "--stride must be at least 1".into())?;
            (cn_flow(&params, &grid, *stride)?, Format::Csv)
        }
        Command::ThresholdScan { beta, r, deltas } => (threshold_scan(&beta.0, &r.0, &deltas.0)?, Format::Csv),
        Command::DipoleScan {
            beta,
            t0,
            s,
            s_tilde,
            samples,
        } => (dipole_scan(&beta.0, &t0.0, *s, *s_tilde, *samples, common.seed)?, Format::Csv),
    };
    let text = match common.format.unwrap_or(default_format) {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    emit(common.out.as_ref(), &text)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn grid(lo: f64, hi: f64, points: usize, log: bool) -> Vec<f64> {
    (0..points)
        .map(|i| {
            let f = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
            if log {
                lo * (hi / lo).powf(f)
            } else {
                lo + (hi - lo) * f
            }
        })
        .collect()
}

fn specfun_table(x_min: f64, x_max: f64, points: usize, linear: bool) -> Result<ScanReport, Failure> {
    usage(x_min > 0.0 && x_max >= x_min && x_max.is_finite(), || {
        format!("need 0 < x-min <= x-max, got {x_min}, {x_max}")
    })?;
    usage(points >= 1, || "--points must be at least 1".into())?;
    let mut report = ScanReport::new("special functions", &["x", "K0", "K1", "p", "W", "W_residual"]);
    for x in grid(x_min, x_max, points, !linear) {
        let w = lambert_w0(x)?;
        report.push_row(vec![x, k0(x)?, k1(x)?, specfun::p(x)?, w, w * w.exp() - x])?;
    }
    let pm = specfun::find_p_max()?;
    report.set("p_max_x0", pm.x0);
    report.set("p_max_value", pm.pmax);
    Ok(report)
}

fn kernel_table(x_min: f64, x_max: f64, points: usize) -> Result<ScanReport, Failure> {
    usage(x_min > 0.0 && x_max >= x_min && x_max.is_finite(), || {
        format!("need 0 < x-min <= x-max, got {x_min}, {x_max}")
    })?;
    usage(points >= 1, || "--points must be at least 1".into())?;
    let mut report = ScanReport::new(
        "kernels and mixture density",
        &["x", "hat", "standard", "m", "g", "m_lower", "m_upper", "m_origin_bound"],
    );
    for x in grid(x_min, x_max, points, true) {
        let env = PI / 4.0 * (-x).exp();
        report.push_row(vec![
            x,
            euclid_hat(x)?,
            standard_kernel(x)?,
            mixture_m(x)?,
            mixture_g(x)?,
            env * (1.0 + x + x * x),
            env * (3.0 + 3.0 * x + x * x),
            1.0 + (M_ORIGIN_COEFF - x.ln() / 4.0) * x * x,
        ])?;
    }
    report.set("yukawa_v_at_1", potentials::yukawa_v(1.0)?);
    Ok(report)
}

fn ebar3() -> Result<ScanReport, Failure> {
    let e = energy::minimize_ebar3_standard()?;
    let probe = (k1(1.0)? - k1(0.5)?) / 2.0;
    let mut report = ScanReport::new("minimal three-particle specific energy", &["r1", "r2", "value"]);
    report.push_row(vec![e.r1, e.r2, e.value])?;
    report.set("r1", e.r1);
    report.set("r2", e.r2);
    report.set("value", e.value);
    report.set("probe", probe);
    Ok(report)
}

fn superadd(c: f64, grid_max: f64, grid_step: f64) -> Result<ScanReport, Failure> {
    usage(c.is_finite(), || format!("--c must be finite, got {c}"))?;
    usage(grid_max > 0.0 && grid_step > 0.0 && grid_step <= grid_max, || {
        format!("need 0 < grid-step <= grid-max, got {grid_step}, {grid_max}")
    })?;
    let margin = energy::superadditivity_margin(c, grid_max, grid_step)?;
    let mut report = ScanReport::new("superadditivity margin", &["c", "margin"]);
    report.push_row(vec![c, margin])?;
    report.set("c", c);
    report.set("margin", margin);
    Ok(report)
}

fn energy_bound_scan(n_max: usize, samples: usize, half_width: f64, kernel: Kernel, seed: u64) -> Result<ScanReport, Failure> {
    usage(n_max >= 2 && samples >= 1, || "need --n-max >= 2 and --samples >= 1".into())?;
    usage(half_width > 0.0 && half_width.is_finite(), || format!("--box must be positive, got {half_width}"))?;
    let stream = RngStream::new(seed, 0);
    Ok(match kernel {
        Kernel::Hat => energy::lower_bound_scan(n_max, samples, half_width, stream)?,
        Kernel::Standard => energy::energy_scan(KernelKind::StandardBessel, n_max, samples, half_width, stream)?,
    })
}

struct UrsellScan {
    configs: usize,
    n_min: usize,
    n_max: usize,
    beta: f64,
    window: ScaleWindow,
    half_width: f64,
    kind: KernelKind,
    grid: OdeGridSpec,
}

fn ursell_compare(scan: &UrsellScan, seed: u64, tol: f64) -> Result<ScanReport, Failure> {
    usage(scan.configs >= 1, || "--configs must be at least 1".into())?;
    usage(2 <= scan.n_min && scan.n_min <= scan.n_max && scan.n_max <= ursell::MAX_PARTICLES, || {
        format!("need 2 <= n-min <= n-max <= {}", ursell::MAX_PARTICLES)
    })?;
    usage(scan.beta >= 0.0 && scan.beta.is_finite(), || format!("--beta must be nonnegative, got {}", scan.beta))?;
    usage(scan.half_width > 0.0 && scan.half_width.is_finite(), || "--box must be positive".into())?;
    let mut report = ScanReport::new(
        "ursell flow against graph sum",
        &["index", "n", "flow", "graph", "discrepancy", "relative"],
    );
    let base = RngStream::new(seed, 1);
    let span = scan.n_max - scan.n_min + 1;
    let (mut worst, mut failures) = (0.0f64, 0usize);
    for i in 0..scan.configs {
        let n = scan.n_min + i % span;
        let config = random_configuration(&mut base.substream(i as u64).rng(), n, scan.half_width);
        let graph = ursell_graph_sum(&config, scan.beta, scan.window, scan.kind)?;
        let ctx = FlowContext {
            beta: scan.beta,
            window: scan.window,
            kind: scan.kind,
            config,
        };
        let flow = ursell_flow(&ctx, &scan.grid)?.top();
        let diff = (flow - graph).abs();
        let rel = diff / graph.abs().max(1.0);
        worst = worst.max(rel);
        if rel > tol {
            failures += 1;
        }
        report.push_row(vec![i as f64, n as f64, flow, graph, diff, rel])?;
    }
    report.set("worst_relative", worst);
    report.set("failures", failures as f64);
    report.set("tol", tol);
    Ok(report)
}

fn majorant_radius(betas: &[f64], k: u32, t0s: &[f64]) -> Result<ScanReport, Failure> {
    usage(k >= 1, || "--k must be at least 1".into())?;
    let mut report = ScanReport::new("majorant radius", &["beta", "k", "t0", "tau", "radius"]);
    for &beta in betas {
        usage(beta > 0.0 && beta.is_finite(), || format!("--beta must be positive, got {beta}"))?;
        for &t0 in t0s {
            let window = checked(ScaleWindow::to_infinity(t0))?;
            let tau = tau_k(beta, k, window)?;
            report.push_row(vec![beta, k as f64, t0, tau, radius_estimate(beta, k, window)?])?;
        }
    }
    report.set("threshold", ThresholdLadder::above(k));
    if let Ok(limit) = majorant::tau_k_limit_bound(betas[0], k) {
        report.set("limit_bound_first_beta", limit.value);
    }
    Ok(report)
}

fn cn_flow(params: &MajorantParams, grid: &OdeGridSpec, stride: usize) -> Result<ScanReport, Failure> {
    let traj = cn_system(params, grid)?;
    let names: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=traj.n_max()).map(|n| format!("C{n}")))
        .collect();
    let cols: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut report = ScanReport::new("majorant coefficients", &cols);
    let last = traj.t.len() - 1;
    for i in (0..traj.t.len()).filter(|&i| i % stride == 0 || i == last) {
        let mut row = vec![traj.t[i]];
        row.extend(traj.c.iter().map(|c| c[i]));
        report.push_row(row)?;
    }
    report.set("tau", tau_k(params.beta, params.k, params.window)?);
    report.set("c2_final", traj.last(2));
    Ok(report)
}

fn threshold_scan(betas: &[f64], rs: &[f64], deltas: &[f64]) -> Result<ScanReport, Failure> {
    usage(deltas.len() >= 3, || format!("need at least 3 deltas, got {}", deltas.len()))?;
    let mut report = ScanReport::new("collapse exponents", &["beta", "r", "slope", "predicted", "exact_slope"]);
    for &beta in betas {
        usage(beta > 0.0 && beta.is_finite(), || format!("--beta must be positive, got {beta}"))?;
        for &r in rs {
            usage(r >= 1.0 && r.fract() == 0.0 && r <= 64.0, || format!("--r entries must be positive integers, got {r}"))?;
            let fit = collapse_scan(beta, r as u32, deltas)?;
            report.push_row(vec![beta, r, fit.slope, fit.predicted, fit.exact_slope.unwrap_or(f64::NAN)])?;
        }
    }
    Ok(report)
}

fn dipole_scan(betas: &[f64], t0s: &[f64], s: f64, s_tilde: f64, samples: usize, seed: u64) -> Result<ScanReport, Failure> {
    usage(s > 0.0 && s <= 1.0 && s_tilde > 0.0 && s_tilde < s, || {
        format!("need 0 < s-tilde < s <= 1, got s = {s}, s-tilde = {s_tilde}")
    })?;
    usage(samples >= 2, || "--samples must be at least 2".into())?;
    usage(t0s.iter().all(|&t| t > 0.0 && t <= s), || "--t0 entries must lie in (0, s]".into())?;
    let mut report = ScanReport::new(
        "pair bound",
        &[
            "beta",
            "t0",
            "a2_bound",
            "delta_bound",
            "mc_estimate",
            "stderr",
            "outside_exponent",
            "inside_exponent",
        ],
    );
    for (i, &beta) in betas.iter().enumerate() {
        usage(beta >= 0.0 && beta.is_finite(), || format!("--beta must be nonnegative, got {beta}"))?;
        for (j, &t0) in t0s.iter().enumerate() {
            let stream = RngStream::new(seed, 2).substream((i * t0s.len() + j) as u64);
            let d = dipole::dipole_report(beta, s, s_tilde, t0, stream, samples)?;
            report.push_row(vec![
                beta,
                t0,
                d.a2_bound,
                d.delta.bound,
                d.delta.estimate,
                d.delta.stderr,
                d.refined.outside_lens,
                d.refined.inside_lens,
            ])?;
        }
    }
    let lam = dipole::lambda_complement_sup(40, 40, 1e-3)?;
    report.set("lambda_complement_sup", lam.sup);
    report.set("lambda_complement_a_priori", lam.a_priori_bound);
    Ok(report)
}
