//! Desk-scale sweeps over the synthetic suite: NGR against 3-D TV and zero fill.

use ngr_core::baselines::{tv3d_inpaint, zero_fill, TvConfig};
use ngr_core::degrade::random_mask;
use ngr_core::metrics::evaluate;
use ngr_core::solver::{run_inpainting, SolverConfig};
use ngr_core::synthetic::piecewise_smooth;
use ngr_core::{Rng, Shape, Tensor3};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::io::{metrics_fields, METRICS_HEADER};

pub const SR_LEVELS: [f64; 3] = [0.5, 0.3, 0.1];
pub const MU_LEVELS: [f64; 4] = [4.0, 16.0, 64.0, 256.0];
pub const LAMBDA_T_LEVELS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
/// Sampling rate held fixed in the mu and lambda_t sweeps.
pub const SWEEP_SR: f64 = 0.3;
pub const SUITE_SEEDS: [u64; 3] = [11, 23, 37];
/// Image `i` is masked with `Rng::new(MASK_SEED + i)`.
pub const MASK_SEED: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    SrSweep,
    MuSweep,
    LambdaTSweep,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::SrSweep => "sr-sweep",
            Suite::MuSweep => "mu-sweep",
            Suite::LambdaTSweep => "lambda-t-sweep",
        }
    }

    /// `all` expands to every suite.
    pub fn parse_list(name: &str) -> Result<Vec<Suite>> {
        match name {
            "sr-sweep" => Ok(vec![Suite::SrSweep]),
            "mu-sweep" => Ok(vec![Suite::MuSweep]),
            "lambda-t-sweep" => Ok(vec![Suite::LambdaTSweep]),
            "all" => Ok(vec![Suite::SrSweep, Suite::MuSweep, Suite::LambdaTSweep]),
            _ => Err(CliError::Usage(format!(
                "unknown suite {name:?} (expected sr-sweep, mu-sweep, lambda-t-sweep or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ngr,
    Tv3d,
    ZeroFill,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ngr, Method::Tv3d, Method::ZeroFill];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ngr => "ngr",
            Method::Tv3d => "tv3d",
            Method::ZeroFill => "zero_fill",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub size: usize,
    pub images: usize,
    pub solver: SolverConfig,
    pub tv: TvConfig,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { size: 64, images: SUITE_SEEDS.len(), solver: SolverConfig::default(), tv: TvConfig::default() }
    }
}

/// One solve: a method on one image under one setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub suite: Suite,
    pub image: usize,
    pub sr: f64,
    pub mu: f64,
    pub lambda_t: f64,
    pub method: Method,
}

/// Cases in output order. The swept value is the outer key, so the swept
/// column is monotone down the file.
pub fn cases(suites: &[Suite], opts: &BenchOptions) -> Vec<Case> {
    let base_mu = opts.solver.mu;
    let base_lt = opts.solver.lambda.t;
    let mut out = Vec::new();
    for &suite in suites {
        let settings: Vec<(f64, f64, f64)> = match suite {
            Suite::SrSweep => SR_LEVELS.iter().map(|&sr| (sr, base_mu, base_lt)).collect(),
            Suite::MuSweep => MU_LEVELS.iter().map(|&mu| (SWEEP_SR, mu, base_lt)).collect(),
            Suite::LambdaTSweep => LAMBDA_T_LEVELS.iter().map(|&lt| (SWEEP_SR, base_mu, lt)).collect(),
        };
        for (sr, mu, lambda_t) in settings {
            for image in 0..opts.images {
                for method in Method::ALL {
                    out.push(Case { suite, image, sr, mu, lambda_t, method });
                }
            }
        }
    }
    out
}

pub fn suite_image(opts: &BenchOptions, image: usize) -> Tensor3 {
    piecewise_smooth(Shape::new(opts.size, opts.size, 3), SUITE_SEEDS[image])
}

pub const CSV_HEADER_PREFIX: &str = "suite,image,sr,mu,lambda_t,method";

pub fn csv_header() -> String {
    format!("{CSV_HEADER_PREFIX},{METRICS_HEADER}")
}

/// Runs one case and returns its CSV row.
pub fn run_case(case: &Case, opts: &BenchOptions) -> Result<String> {
    let gt = suite_image(opts, case.image);
    let mask = random_mask(&mut Rng::new(MASK_SEED + case.image as u64), gt.shape(), case.sr)?;
    let y = mask.project(&gt);
    let x = match case.method {
        Method::ZeroFill => zero_fill(&y, &mask)?,
        Method::Ngr => {
            let mut cfg = opts.solver;
            cfg.mu = case.mu;
            cfg.lambda.t = case.lambda_t;
            run_inpainting(&y, &mask, &cfg)?.x
        }
        Method::Tv3d => {
            let mut cfg = opts.tv;
            if case.suite == Suite::MuSweep {
                cfg.mu = case.mu;
            }
            cfg.lambda.t = case.lambda_t;
            tv3d_inpaint(&y, &mask, &cfg)?
        }
    };
    let m = evaluate(&x, &gt)?;
    Ok(format!(
        "{},{},{},{},{},{},{}",
        case.suite.name(),
        case.image,
        case.sr,
        case.mu,
        case.lambda_t,
        case.method.name(),
        metrics_fields(&m)
    ))
}

/// Runs every case on up to `jobs` threads. Each solve is single-threaded and
/// deterministic, and rows come back in case order, so the CSV does not depend
/// on `jobs`.
pub fn run(suites: &[Suite], opts: &BenchOptions, jobs: usize) -> Result<String> {
    if opts.images == 0 || opts.images > SUITE_SEEDS.len() {
        return Err(CliError::Usage(format!("--images must lie in 1..={}", SUITE_SEEDS.len())));
    }
    if opts.size < 11 {
        return Err(CliError::Usage("--size must be at least 11 (SSIM window)".into()));
    }
    let all = cases(suites, opts);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    let rows: Vec<String> = pool.install(|| all.par_iter().map(|c| run_case(c, opts)).collect::<Result<_>>())?;
    let mut csv = csv_header();
    csv.push('\n');
    for r in rows {
        csv.push_str(&r);
        csv.push('\n');
    }
    Ok(csv)
}
