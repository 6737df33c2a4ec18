//! ADMM for inpainting with the gradient regularizer.
//!
//! Splitting `P(X + K) = P(Y)` with `K` confined to the unobserved entries, each
//! outer iteration runs, in order: Adam steps on the network, the closed-form `K`
//! update, the FFT image solve, and multiplier ascent.

use crate::error::{Error, Result};
use crate::net::{penalty, GradientTriple, NetParams};
use crate::tensor::{grad_adjoint_acc, Axis, Tensor3};

use super::config::SolverConfig;
use super::mask::ObservationMask;
use super::prior::GradientPrior;
use super::trace::{IterationTrace, TraceRecord};
use super::xupdate::ScreenedPoisson;

/// Everything that evolves during one inpainting solve.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub x: Tensor3,
    pub k: Tensor3,
    /// Lagrange multiplier.
    pub dual: Tensor3,
    pub prior: GradientPrior,
    pub iteration: usize,
}

impl AdmmState {
    /// `X = P(Y)`, `K = 0`, multipliers zero; network input and weights from `cfg.seed`.
    pub fn new(y: &Tensor3, mask: &ObservationMask, cfg: &SolverConfig, initial: Option<NetParams>) -> Result<Self> {
        cfg.validate()?;
        mask.check_tensor(y)?;
        let shape = y.shape();
        Ok(AdmmState {
            x: mask.project(y),
            k: Tensor3::zeros(shape),
            dual: Tensor3::zeros(shape),
            prior: GradientPrior::new(shape, cfg, initial)?,
            iteration: 0,
        })
    }

    pub fn prediction(&self) -> &GradientTriple {
        self.prior.prediction()
    }
}

/// Adam steps on the network against the gradients of the current `X`.
/// Returns the loss before the first step.
pub fn update_theta(state: &mut AdmmState, cfg: &SolverConfig) -> Result<f64> {
    let target = GradientTriple::of(&state.x);
    state.prior.train(&target, &cfg.lambda, cfg.adam_steps_per_iter)
}

/// `P(Y) - X + Lambda/mu`, the unconstrained minimizer of the augmented term in `K`.
fn k_free(py: f64, x: f64, dual: f64, mu: f64) -> f64 {
    py - x + dual / mu
}

/// `K = P(Y) - X + Lambda/mu` off the mask and zero on it. `P(Y)` vanishes off
/// the mask, so `Y` itself is never read.
pub fn update_k(state: &mut AdmmState, _y: &Tensor3, mask: &ObservationMask, mu: f64) {
    let obs = mask.as_slice();
    let (x, dual) = (state.x.data(), state.dual.data());
    for (i, k) in state.k.data_mut().iter_mut().enumerate() {
        *k = if obs[i] { 0.0 } else { k_free(0.0, x[i], dual[i], mu) };
    }
}

/// `P(Y) - X - K + Lambda/mu`, grouped so that it is exactly zero wherever `K`
/// took its free value.
pub fn augmented_residual(state: &AdmmState, y: &Tensor3, mask: &ObservationMask, mu: f64) -> Tensor3 {
    let obs = mask.as_slice();
    let mut out = Tensor3::zeros(y.shape());
    let (x, k, dual, yd) = (state.x.data(), state.k.data(), state.dual.data(), y.data());
    for (i, r) in out.data_mut().iter_mut().enumerate() {
        let py = if obs[i] { yd[i] } else { 0.0 };
        *r = k_free(py, x[i], dual[i], mu) - k[i];
    }
    out
}

/// Right-hand side `R = sum_i lambda_i grad_i^T f_i + mu (P(Y) - K) + Lambda`.
pub fn compute_rhs(
    state: &AdmmState,
    y: &Tensor3,
    mask: &ObservationMask,
    cfg: &SolverConfig,
    triple: &GradientTriple,
) -> Tensor3 {
    let obs = mask.as_slice();
    let mut r = Tensor3::zeros(y.shape());
    let (k, dual, yd) = (state.k.data(), state.dual.data(), y.data());
    for (i, v) in r.data_mut().iter_mut().enumerate() {
        let py = if obs[i] { yd[i] } else { 0.0 };
        *v = cfg.mu * (py - k[i]) + dual[i];
    }
    for axis in Axis::ALL {
        let w = cfg.lambda.get(axis);
        if w != 0.0 {
            grad_adjoint_acc(&triple[axis], axis, w, &mut r);
        }
    }
    r
}

/// `Lambda += mu (P(Y) - X - K)`.
pub fn update_lambda(state: &mut AdmmState, y: &Tensor3, mask: &ObservationMask, mu: f64) {
    let obs = mask.as_slice();
    let (x, k, yd) = (state.x.data(), state.k.data(), y.data());
    for (i, l) in state.dual.data_mut().iter_mut().enumerate() {
        let py = if obs[i] { yd[i] } else { 0.0 };
        *l += mu * (py - x[i] - k[i]);
    }
}

/// The gradient penalty and the augmented fidelity term, separately.
pub fn objective_terms(state: &AdmmState, y: &Tensor3, mask: &ObservationMask, cfg: &SolverConfig) -> (f64, f64) {
    let target = GradientTriple::of(&state.x);
    let pen = penalty(state.prediction(), &target, &cfg.lambda);
    let obs = mask.as_slice();
    let (x, k, dual, yd) = (state.x.data(), state.k.data(), state.dual.data(), y.data());
    let mut aug = 0.0;
    for i in 0..x.len() {
        let py = if obs[i] { yd[i] } else { 0.0 };
        let r = py - x[i] - k[i] + dual[i] / cfg.mu;
        aug += r * r;
    }
    (pen, 0.5 * cfg.mu * aug)
}

/// Augmented Lagrangian value (the indicator on `K` is zero by construction).
pub fn objective_value(state: &AdmmState, y: &Tensor3, mask: &ObservationMask, cfg: &SolverConfig) -> f64 {
    let (pen, aug) = objective_terms(state, y, mask, cfg);
    pen + aug
}

/// Max-abs of `P(Y - X)`.
pub fn observed_residual(x: &Tensor3, y: &Tensor3, mask: &ObservationMask) -> f64 {
    x.data()
        .iter()
        .zip(y.data())
        .zip(mask.as_slice())
        .filter(|(_, &o)| o)
        .fold(0.0, |m, ((a, b), _)| m.max((a - b).abs()))
}

#[derive(Default)]
pub struct RunOptions<'a> {
    /// Start from these weights instead of a fresh initialization.
    pub initial_params: Option<NetParams>,
    /// Monotonic clock in milliseconds, used only to fill the trace timing column.
    pub clock: Option<&'a dyn Fn() -> f64>,
}

#[derive(Debug, Clone)]
pub struct InpaintOutput {
    /// Restored image, clamped to `[0, 1]`.
    pub x: Tensor3,
    pub trace: IterationTrace,
    pub params: NetParams,
}

pub fn run_inpainting(y: &Tensor3, mask: &ObservationMask, cfg: &SolverConfig) -> Result<InpaintOutput> {
    run_inpainting_with(y, mask, cfg, RunOptions::default())
}

pub fn run_inpainting_with(
    y: &Tensor3,
    mask: &ObservationMask,
    cfg: &SolverConfig,
    opts: RunOptions<'_>,
) -> Result<InpaintOutput> {
    mask.check_tensor(y)?;
    if mask.count() == 0 {
        return Err(Error::invalid("observation mask is empty"));
    }
    if !y.is_finite() {
        return Err(Error::invalid("observation contains non-finite values"));
    }
    let y = mask.project(y);
    let mut state = AdmmState::new(&y, mask, cfg, opts.initial_params)?;
    let solver = ScreenedPoisson::new(y.shape(), cfg.lambda, cfg.mu)?;
    let start = opts.clock.map(|c| c());
    let mut trace = IterationTrace::default();

    for it in 1..=cfg.outer_iters {
        update_theta(&mut state, cfg).map_err(|e| at_iteration(e, it))?;
        update_k(&mut state, &y, mask, cfg.mu);
        let rhs = compute_rhs(&state, &y, mask, cfg, state.prediction());
        let x_new = solver.solve(&rhs)?;
        if !x_new.is_finite() {
            return Err(Error::NonFinite { stage: "image update", iteration: it });
        }
        let change = x_new.zip_map(&state.x, |a, b| a - b).norm() / state.x.norm().max(f64::MIN_POSITIVE);
        state.x = x_new;
        update_lambda(&mut state, &y, mask, cfg.mu);
        state.iteration = it;

        trace.records.push(TraceRecord {
            iter: it,
            objective: objective_value(&state, &y, mask, cfg),
            residual: observed_residual(&state.x, &y, mask),
            elapsed_ms: opts.clock.zip(start).map(|(c, s)| c() - s),
        });
        if cfg.snapshot_every > 0 && it % cfg.snapshot_every == 0 {
            trace.snapshots.push((it, state.prediction().clone()));
        }
        if cfg.tol > 0.0 && change < cfg.tol {
            break;
        }
    }

    let mut x = state.x;
    x.clamp(0.0, 1.0);
    Ok(InpaintOutput { x, trace, params: state.prior.into_params() })
}

fn at_iteration(e: Error, it: usize) -> Error {
    match e {
        Error::NonFinite { stage, .. } => Error::NonFinite { stage, iteration: it },
        other => other,
    }
}
