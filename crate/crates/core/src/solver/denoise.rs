//! Denoising with the gradient regularizer.
//!
//! This model is this crate's own construction: minimize
//! `beta/2 |Y - X - S|^2 + tau |S|_1 + sum_i lambda_i/2 |grad_i X - f_i|^2`
//! by cycling through the network (Adam), the sparse outliers `S`
//! (soft-thresholding at `tau/beta`) and the image (the same FFT solve as
//! inpainting, with `beta` in place of `mu`). `tau = 0` keeps `S` at zero.

use crate::error::{Error, Result};
use crate::net::{penalty, GradientTriple, NetParams};
use crate::prox::shrink;
use crate::tensor::{grad_adjoint_acc, Axis, Tensor3};

use super::admm::RunOptions;
use super::config::DenoiseConfig;
use super::prior::GradientPrior;
use super::trace::{IterationTrace, TraceRecord};
use super::xupdate::ScreenedPoisson;

#[derive(Debug, Clone)]
pub struct DenoiseOutput {
    /// Restored image, clamped to `[0, 1]`.
    pub x: Tensor3,
    /// Sparse outlier component.
    pub s: Tensor3,
    pub trace: IterationTrace,
    pub params: NetParams,
}

pub fn run_denoising(y: &Tensor3, cfg: &DenoiseConfig) -> Result<DenoiseOutput> {
    run_denoising_with(y, cfg, RunOptions::default())
}

pub fn run_denoising_with(y: &Tensor3, cfg: &DenoiseConfig, opts: RunOptions<'_>) -> Result<DenoiseOutput> {
    cfg.validate()?;
    if !y.is_finite() {
        return Err(Error::invalid("observation contains non-finite values"));
    }
    let sc = &cfg.solver;
    let shape = y.shape();
    let mut prior = GradientPrior::new(shape, sc, opts.initial_params)?;
    let solver = ScreenedPoisson::new(shape, sc.lambda, cfg.beta)?;
    let threshold = cfg.tau / cfg.beta;
    let mut x = y.clone();
    let mut s = Tensor3::zeros(shape);
    let start = opts.clock.map(|c| c());
    let mut trace = IterationTrace::default();

    for it in 1..=sc.outer_iters {
        let target = GradientTriple::of(&x);
        prior.train(&target, &sc.lambda, sc.adam_steps_per_iter).map_err(|e| match e {
            Error::NonFinite { stage, .. } => Error::NonFinite { stage, iteration: it },
            other => other,
        })?;

        if cfg.tau > 0.0 {
            for ((sv, &yv), &xv) in s.data_mut().iter_mut().zip(y.data()).zip(x.data()) {
                *sv = shrink(yv - xv, threshold);
            }
        }

        let mut rhs = y.zip_map(&s, |a, b| cfg.beta * (a - b));
        for axis in Axis::ALL {
            let w = sc.lambda.get(axis);
            if w != 0.0 {
                grad_adjoint_acc(&prior.prediction()[axis], axis, w, &mut rhs);
            }
        }
        let x_new = solver.solve(&rhs)?;
        if !x_new.is_finite() {
            return Err(Error::NonFinite { stage: "image update", iteration: it });
        }
        let change = x_new.zip_map(&x, |a, b| a - b).norm() / x.norm().max(f64::MIN_POSITIVE);
        x = x_new;

        let mut fid = 0.0;
        let mut l1 = 0.0;
        let mut resid: f64 = 0.0;
        for ((&yv, &xv), &sv) in y.data().iter().zip(x.data()).zip(s.data()) {
            let r = yv - xv - sv;
            fid += r * r;
            l1 += sv.abs();
            resid = resid.max(r.abs());
        }
        let pen = penalty(prior.prediction(), &GradientTriple::of(&x), &sc.lambda);
        trace.records.push(TraceRecord {
            iter: it,
            objective: 0.5 * cfg.beta * fid + cfg.tau * l1 + pen,
            residual: resid,
            elapsed_ms: opts.clock.zip(start).map(|(c, s0)| c() - s0),
        });
        if sc.snapshot_every > 0 && it % sc.snapshot_every == 0 {
            trace.snapshots.push((it, prior.prediction().clone()));
        }
        if sc.tol > 0.0 && change < sc.tol {
            break;
        }
    }

    x.clamp(0.0, 1.0);
    Ok(DenoiseOutput { x, s, trace, params: prior.into_params() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{AxisWeights, NetConfig};
    use crate::rng::Rng;
    use crate::solver::SolverConfig;
    use crate::tensor::Shape;

    fn cfg(tau: f64, lambda: AxisWeights) -> DenoiseConfig {
        DenoiseConfig {
            solver: SolverConfig {
                lambda,
                outer_iters: 5,
                net: NetConfig { blocks: 2, width: 4, ..NetConfig::default() },
                ..SolverConfig::default()
            },
            beta: 2.0,
            tau,
        }
    }

    #[test]
    fn fidelity_only_returns_observation() {
        let y = Rng::new(1).uniform(Shape::new(8, 8, 2), 0.0, 1.0).unwrap();
        let out = run_denoising(&y, &cfg(0.0, AxisWeights::new(0.0, 0.0, 0.0))).unwrap();
        assert_eq!(out.x, y);
        assert_eq!(out.s.max_abs(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_beta() {
        let y = Tensor3::zeros(Shape::new(4, 4, 1));
        let mut c = cfg(0.1, AxisWeights::ONES);
        c.beta = 0.0;
        assert!(run_denoising(&y, &c).is_err());
    }

    #[test]
    fn outliers_only_where_residual_exceeds_threshold() {
        let shape = Shape::new(8, 8, 2);
        let mut y = Tensor3::filled(shape, 0.4);
        let mut rng = Rng::new(3);
        for i in rng.choose_distinct(shape.len(), 20) {
            y[i] = if rng.bernoulli(0.5) { 1.0 } else { 0.0 };
        }
        let c = cfg(0.2, AxisWeights::ONES);
        let out = run_denoising(&y, &c).unwrap();
        assert!(out.s.data().iter().any(|&v| v != 0.0));
    }
}
