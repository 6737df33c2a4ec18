//! The `ngr` command line.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error
//! (unreadable or mismatched inputs), 4 numeric failure (a NaN mid-solve or a
//! failed self-check).

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ngr_core::baselines::{tv3d_inpaint, TvConfig};
use ngr_core::degrade::{
    add_gaussian, add_impulse, add_stripes, apply_mixed, deadline_mask, random_mask, MixedNoisePreset,
    DEFAULT_STRIPE_RANGE,
};
use ngr_core::metrics::evaluate;
use ngr_core::solver::{observed_residual, run_denoising_with, run_inpainting_with, DenoiseConfig, RunOptions, SolverConfig};
use ngr_core::Rng;

use crate::bench::{self, BenchOptions, Suite};
use crate::config::{apply_overrides, parse_onto, Settings};
use crate::error::{CliError, Result};
use crate::io;
use crate::selfcheck;

/// Environment variable that replaces the built-in default seed.
pub const SEED_ENV: &str = "NGR_SEED";

#[derive(Debug, Parser)]
#[command(name = "ngr", version, about = "Zero-shot image restoration with a neural gradient regularizer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a degraded observation (and a mask for the masking kinds).
    Degrade(DegradeArgs),
    /// Inpaint missing entries with the neural gradient regularizer.
    Inpaint(InpaintArgs),
    /// Remove Gaussian or mixed noise with the neural gradient regularizer.
    ///
    /// The denoising model (a sparse outlier term plus the gradient penalty,
    /// solved by block coordinate descent) is this project's own construction.
    Denoise(DenoiseArgs),
    /// Inpaint with the anisotropic 3-D total variation baseline.
    TvInpaint(TvArgs),
    /// Print PSNR, SSIM, SAM and ERGAS of an image against a reference as CSV.
    Eval(EvalArgs),
    /// Run desk-scale sweeps on the synthetic suite and write a CSV.
    Bench(BenchArgs),
    /// Run the numerical self-tests.
    Selfcheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DegradeKind {
    Random,
    Deadline,
    Gaussian,
    Impulse,
    Stripes,
    Mixed,
}

#[derive(Debug, Args)]
pub struct DegradeArgs {
    /// Clean image (PNG or tensor file).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the observation mask (random and deadline kinds).
    #[arg(long)]
    pub mask_out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: DegradeKind,
    /// Sampling rate for `random`.
    #[arg(long)]
    pub sr: Option<f64>,
    /// Missing columns for `deadline`.
    #[arg(long)]
    pub columns: Option<usize>,
    /// Noise level for `gaussian`.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Fraction of corrupted entries for `impulse`.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Fraction of bands that get stripes (`stripes`).
    #[arg(long, default_value_t = 1.0)]
    pub band_fraction: f64,
    /// Stripes per affected band (`stripes`).
    #[arg(long, default_value_t = 10)]
    pub per_band: usize,
    #[arg(long, default_value_t = DEFAULT_STRIPE_RANGE.0, allow_hyphen_values = true)]
    pub stripe_min: f64,
    #[arg(long, default_value_t = DEFAULT_STRIPE_RANGE.1, allow_hyphen_values = true)]
    pub stripe_max: f64,
    /// Mixed-noise preset: weak, strong or none.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Solver configuration shared by the NGR commands.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set mu=64`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct InpaintArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// 0/1 tensor or PNG (nonzero = observed).
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Per-iteration CSV: iter, objective, residual, wall_ms.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Directory for the predicted gradient maps kept every `snapshot_every` iterations.
    #[arg(long)]
    pub snapshots_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fill the wall_ms trace column (makes the trace run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Start from saved network weights instead of a fresh initialization.
    #[arg(long)]
    pub load_weights: Option<PathBuf>,
    /// Save the final network weights.
    #[arg(long)]
    pub save_weights: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenoiseMode {
    /// Gaussian noise only: the outlier term is switched off (tau = 0).
    Gaussian,
    /// Gaussian plus sparse outliers (impulse, stripes, deadlines).
    Mixed,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub cfg: ConfigArgs,
    #[arg(long, value_enum, default_value_t = DenoiseMode::Mixed)]
    pub mode: DenoiseMode,
    /// Write the estimated sparse outliers here.
    #[arg(long)]
    pub sparse_out: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct TvArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub cfg: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// sr-sweep, mu-sweep, lambda-t-sweep or all.
    #[arg(long, default_value = "sr-sweep")]
    pub suite: String,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Independent solves run concurrently on this many threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Side length of the synthetic images.
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    /// Number of suite images to use.
    #[arg(long, default_value_t = 3)]
    pub images: usize,
    /// NGR solver configuration.
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// TV baseline configuration.
    #[arg(long)]
    pub tv_config: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={s:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Precedence, lowest first: built-in default, `NGR_SEED`, config file, `--set`.
fn load<T: Settings>(args: &ConfigArgs, base: T, seed_env: Option<u64>, seed_key: bool) -> Result<T> {
    let mut base = base;
    if let (Some(s), true) = (seed_env, seed_key) {
        base.set("seed", &s.to_string()).map_err(CliError::Usage)?;
    }
    let cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse_onto(base, &text, &p.display().to_string())?
        }
        None => base,
    };
    apply_overrides(cfg, &args.overrides)
}

fn quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_./=:,+".contains(c)) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}

/// Builds the replayable invocation line printed to stderr.
struct Echo(Vec<String>);

impl Echo {
    fn new(cmd: &str) -> Self {
        Echo(vec!["ngr".into(), cmd.into()])
    }

    fn arg(&mut self, flag: &str, v: impl ToString) -> &mut Self {
        self.0.push(flag.into());
        self.0.push(quote(&v.to_string()));
        self
    }

    fn path(&mut self, flag: &str, p: &Option<PathBuf>) -> &mut Self {
        if let Some(p) = p {
            self.arg(flag, p.display());
        }
        self
    }

    fn flag(&mut self, flag: &str, on: bool) -> &mut Self {
        if on {
            self.0.push(flag.into());
        }
        self
    }

    fn settings<T: Settings>(&mut self, cfg: &T, flag: &str) -> &mut Self {
        for (k, v) in cfg.pairs() {
            self.arg(flag, format!("{k}={v}"));
        }
        self
    }

    fn print(&self) {
        eprintln!("# {}", self.0.join(" "));
    }
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Degrade(a) => degrade(a),
        Command::Inpaint(a) => inpaint(a),
        Command::Denoise(a) => denoise(a),
        Command::TvInpaint(a) => tv(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => run_bench(a),
        Command::Selfcheck => Ok(run_selfcheck()),
    }
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("--kind {kind} needs {flag}")))
}

fn degrade(a: DegradeArgs) -> Result<i32> {
    let seed = match a.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let kind = a.kind.to_possible_value().unwrap().get_name().to_string();
    let masking = matches!(a.kind, DegradeKind::Random | DegradeKind::Deadline);
    if masking && a.mask_out.is_none() {
        return Err(CliError::Usage(format!("--kind {kind} needs --mask-out")));
    }
    let x = io::read_image(&a.input)?;
    let mut rng = Rng::new(seed);
    let mut echo = Echo::new("degrade");
    echo.arg("--in", a.input.display()).arg("--out", a.out.display()).path("--mask-out", &a.mask_out);
    echo.arg("--kind", &kind);
    let summary;
    let (out, mask) = match a.kind {
        DegradeKind::Random => {
            let sr = need(a.sr, "--sr", &kind)?;
            echo.arg("--sr", sr);
            let m = random_mask(&mut rng, x.shape(), sr).map_err(|e| CliError::Usage(e.to_string()))?;
            summary = format!("observed {:.4} ({}/{})", m.fraction(), m.count(), x.len());
            (m.project(&x), Some(m))
        }
        DegradeKind::Deadline => {
            let n = need(a.columns, "--columns", &kind)?;
            echo.arg("--columns", n);
            let m = deadline_mask(&mut rng, x.shape(), n).map_err(|e| CliError::Usage(e.to_string()))?;
            summary = format!("{n} missing columns, observed {:.4}", m.fraction());
            (m.project(&x), Some(m))
        }
        DegradeKind::Gaussian => {
            let s = need(a.sigma, "--sigma", &kind)?;
            echo.arg("--sigma", s);
            summary = format!("sigma {s}");
            (add_gaussian(&mut rng, &x, s).map_err(|e| CliError::Usage(e.to_string()))?, None)
        }
        DegradeKind::Impulse => {
            let r = need(a.ratio, "--ratio", &kind)?;
            echo.arg("--ratio", r);
            summary = format!("impulse ratio {r}");
            (add_impulse(&mut rng, &x, r).map_err(|e| CliError::Usage(e.to_string()))?, None)
        }
        DegradeKind::Stripes => {
            echo.arg("--band-fraction", a.band_fraction).arg("--per-band", a.per_band);
            echo.arg("--stripe-min", a.stripe_min).arg("--stripe-max", a.stripe_max);
            summary = format!("{} stripes on {} of the bands", a.per_band, a.band_fraction);
            let y = add_stripes(&mut rng, &x, a.band_fraction, a.per_band, (a.stripe_min, a.stripe_max))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            (y, None)
        }
        DegradeKind::Mixed => {
            let name = need(a.preset.clone(), "--preset", &kind)?;
            let preset = MixedNoisePreset::by_name(&name)
                .ok_or_else(|| CliError::Usage(format!("unknown preset {name:?} (weak, strong or none)")))?;
            echo.arg("--preset", &name);
            summary = format!("preset {name}");
            (apply_mixed(&mut rng, &x, &preset).map_err(|e| CliError::Usage(e.to_string()))?, None)
        }
    };
    echo.arg("--seed", seed).print();
    io::write_image(&out, &a.out)?;
    if let (Some(m), Some(p)) = (mask, &a.mask_out) {
        io::write_mask(&m, p)?;
    }
    println!("degrade {kind}: {} {summary}, seed {seed}", x.shape());
    Ok(0)
}

fn clock_ms(start: Instant) -> impl Fn() -> f64 {
    move || start.elapsed().as_secs_f64() * 1e3
}

fn inpaint(a: InpaintArgs) -> Result<i32> {
    let mut cfg: SolverConfig = load(&a.cfg, SolverConfig::default(), env_seed()?, true)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let y = io::read_image(&a.input)?;
    let mask = io::read_mask(&a.mask)?;
    if mask.shape() != y.shape() {
        return Err(CliError::Data(format!("mask shape {} does not match image shape {}", mask.shape(), y.shape())));
    }
    let initial = match &a.load_weights {
        Some(p) => Some(io::read_weights_for(p, &cfg.net.resolved(y.shape().channels))?),
        None => None,
    };
    let mut echo = Echo::new("inpaint");
    echo.arg("--in", a.input.display()).arg("--mask", a.mask.display()).arg("--out", a.out.display());
    echo.path("--trace", &a.trace).path("--snapshots-dir", &a.snapshots_dir);
    echo.path("--load-weights", &a.load_weights).path("--save-weights", &a.save_weights);
    echo.flag("--timing", a.timing).settings(&cfg, "--set").print();

    let clock = clock_ms(Instant::now());
    let opts = RunOptions { initial_params: initial, clock: a.timing.then_some(&clock as &dyn Fn() -> f64) };
    let out = run_inpainting_with(&y, &mask, &cfg, opts)?;
    io::write_image(&out.x, &a.out)?;
    if let Some(p) = &a.trace {
        io::write_trace(&out.trace, p)?;
    }
    if let Some(d) = &a.snapshots_dir {
        io::write_snapshots(&out.trace, d)?;
    }
    if let Some(p) = &a.save_weights {
        io::write_weights(&out.params, p)?;
    }
    println!(
        "inpaint: {} iterations, on-mask residual {:.3e}, observed {:.4}",
        out.trace.len(),
        observed_residual(&out.x, &mask.project(&y), &mask),
        mask.fraction()
    );
    Ok(0)
}

fn denoise(a: DenoiseArgs) -> Result<i32> {
    let mut cfg: DenoiseConfig = load(&a.cfg, DenoiseConfig::default(), env_seed()?, true)?;
    if let Some(s) = a.seed {
        cfg.solver.seed = s;
    }
    if a.mode == DenoiseMode::Gaussian {
        cfg.tau = 0.0;
    }
    let y = io::read_image(&a.input)?;
    let mut echo = Echo::new("denoise");
    echo.arg("--in", a.input.display()).arg("--out", a.out.display());
    echo.arg("--mode", a.mode.to_possible_value().unwrap().get_name());
    echo.path("--sparse-out", &a.sparse_out).path("--trace", &a.trace).flag("--timing", a.timing);
    echo.settings(&cfg, "--set").print();

    let clock = clock_ms(Instant::now());
    let opts = RunOptions { initial_params: None, clock: a.timing.then_some(&clock as &dyn Fn() -> f64) };
    let out = run_denoising_with(&y, &cfg, opts)?;
    io::write_image(&out.x, &a.out)?;
    if let Some(p) = &a.sparse_out {
        io::write_tensor(&out.s, p)?;
    }
    if let Some(p) = &a.trace {
        io::write_trace(&out.trace, p)?;
    }
    let support = out.s.data().iter().filter(|&&v| v != 0.0).count();
    println!("denoise: {} iterations, {} outlier entries", out.trace.len(), support);
    Ok(0)
}

fn tv(a: TvArgs) -> Result<i32> {
    let cfg: TvConfig = load(&a.cfg, TvConfig::default(), None, false)?;
    let y = io::read_image(&a.input)?;
    let mask = io::read_mask(&a.mask)?;
    if mask.shape() != y.shape() {
        return Err(CliError::Data(format!("mask shape {} does not match image shape {}", mask.shape(), y.shape())));
    }
    let mut echo = Echo::new("tv-inpaint");
    echo.arg("--in", a.input.display()).arg("--mask", a.mask.display()).arg("--out", a.out.display());
    echo.settings(&cfg, "--set").print();
    let x = tv3d_inpaint(&mask.project(&y), &mask, &cfg)?;
    io::write_image(&x, &a.out)?;
    println!("tv-inpaint: {} iterations", cfg.iters);
    Ok(0)
}

fn eval(a: EvalArgs) -> Result<i32> {
    let x = io::read_image(&a.x)?;
    let r = io::read_image(&a.reference)?;
    if x.shape() != r.shape() {
        return Err(CliError::Data(format!("shape {} does not match reference {}", x.shape(), r.shape())));
    }
    let m = evaluate(&x, &r)?;
    println!("{}", io::METRICS_HEADER);
    println!("{}", io::metrics_fields(&m));
    Ok(0)
}

fn run_bench(a: BenchArgs) -> Result<i32> {
    let suites = Suite::parse_list(&a.suite)?;
    let solver: SolverConfig = load(&a.cfg, SolverConfig::default(), env_seed()?, true)?;
    let tv: TvConfig = match &a.tv_config {
        Some(p) => crate::config::read_config(p)?,
        None => TvConfig::default(),
    };
    let opts = BenchOptions { size: a.size, images: a.images, solver, tv };
    let mut echo = Echo::new("bench");
    echo.arg("--suite", &a.suite).arg("--out-dir", a.out_dir.display()).arg("--jobs", a.jobs);
    echo.arg("--size", a.size).arg("--images", a.images).path("--tv-config", &a.tv_config);
    echo.settings(&solver, "--set").print();
    let csv = bench::run(&suites, &opts, a.jobs)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::io(&a.out_dir, e))?;
    let path = a.out_dir.join("bench.csv");
    io::write_text(&path, &csv)?;
    println!("bench: {} rows written to {}", csv.lines().count() - 1, path.display());
    Ok(0)
}

fn run_selfcheck() -> i32 {
    let checks = selfcheck::run_all();
    for c in &checks {
        println!("{}", c.line());
    }
    if checks.iter().all(|c| c.passed) {
        0
    } else {
        4
    }
}
