//! Reference methods: anisotropic 3-D total variation and naive fills.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::net::AxisWeights;
use crate::prox::shrink;
use crate::solver::{ObservationMask, ScreenedPoisson};
use crate::tensor::{grad, grad_adjoint_acc, Axis, Tensor3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvConfig {
    pub lambda: AxisWeights,
    pub mu: f64,
    pub iters: usize,
}

impl Default for TvConfig {
    fn default() -> Self {
        TvConfig { lambda: AxisWeights::ONES, mu: 4.0, iters: 300 }
    }
}

impl TvConfig {
    pub fn validate(&self) -> Result<()> {
        self.lambda.validate()?;
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid("TV mu must be positive"));
        }
        if self.iters == 0 {
            return Err(Error::invalid("TV iters must be at least 1"));
        }
        Ok(())
    }
}

/// `sum_i lambda_i |grad_i x|_1`.
pub fn tv_value(x: &Tensor3, lambda: &AxisWeights) -> f64 {
    Axis::ALL
        .iter()
        .filter(|&&a| lambda.get(a) != 0.0)
        .map(|&a| lambda.get(a) * grad(x, a).data().iter().map(|v| v.abs()).sum::<f64>())
        .sum()
}

#[derive(Debug, Clone)]
pub struct TvOutput {
    pub x: Tensor3,
    /// TV value of the constrained iterate after each iteration.
    pub objective: Vec<f64>,
}

pub fn tv3d_inpaint(y: &Tensor3, mask: &ObservationMask, cfg: &TvConfig) -> Result<Tensor3> {
    tv3d_inpaint_traced(y, mask, cfg).map(|o| o.x)
}

/// Minimizes `sum_i lambda_i |grad_i X|_1` subject to `P(X) = P(Y)`.
///
/// Splitting: `Z_i = grad_i X` and `W = X` with `W` confined to the constraint set.
/// `X` is one FFT solve of `(I + sum_i D_i^T D_i) X = (W - V) + sum_i D_i^T (Z_i - U_i)`;
/// `Z` and `W` are then updated jointly (shrinkage and re-projection). The returned
/// image is `W`, so observed entries equal `Y` exactly.
pub fn tv3d_inpaint_traced(y: &Tensor3, mask: &ObservationMask, cfg: &TvConfig) -> Result<TvOutput> {
    cfg.validate()?;
    mask.check_tensor(y)?;
    if mask.count() == 0 {
        return Err(Error::invalid("observation mask is empty"));
    }
    let shape = y.shape();
    let solver = ScreenedPoisson::new(shape, AxisWeights::ONES, 1.0)?;
    let obs = mask.as_slice();
    let project = |v: &mut Tensor3| {
        for ((w, &o), &yv) in v.data_mut().iter_mut().zip(obs).zip(y.data()) {
            if o {
                *w = yv;
            }
        }
    };
    let mut w = mask.project(y);
    let mut v = Tensor3::zeros(shape);
    let mut z: Vec<Tensor3> = Axis::ALL.iter().map(|&a| grad(&w, a)).collect();
    let mut u: Vec<Tensor3> = (0..3).map(|_| Tensor3::zeros(shape)).collect();
    let mut objective = Vec::with_capacity(cfg.iters);

    for it in 1..=cfg.iters {
        let mut rhs = w.zip_map(&v, |a, b| a - b);
        for (i, &axis) in Axis::ALL.iter().enumerate() {
            let d = z[i].zip_map(&u[i], |a, b| a - b);
            grad_adjoint_acc(&d, axis, 1.0, &mut rhs);
        }
        let x = solver.solve(&rhs)?;
        if !x.is_finite() {
            return Err(Error::NonFinite { stage: "tv image update", iteration: it });
        }
        for (i, &axis) in Axis::ALL.iter().enumerate() {
            let g = grad(&x, axis);
            let t = cfg.lambda.get(axis) / cfg.mu;
            for ((zv, uv), &gv) in z[i].data_mut().iter_mut().zip(u[i].data_mut()).zip(g.data()) {
                *zv = shrink(gv + *uv, t);
                *uv += gv - *zv;
            }
        }
        w = x.zip_map(&v, |a, b| a + b);
        project(&mut w);
        for ((vv, &xv), &wv) in v.data_mut().iter_mut().zip(x.data()).zip(w.data()) {
            *vv += xv - wv;
        }
        objective.push(tv_value(&w, &cfg.lambda));
    }
    Ok(TvOutput { x: w, objective })
}

/// Unobserved entries set to zero.
pub fn zero_fill(y: &Tensor3, mask: &ObservationMask) -> Result<Tensor3> {
    mask.check_tensor(y)?;
    Ok(mask.project(y))
}

/// Unobserved entries set to the mean of the observed ones.
pub fn mean_fill(y: &Tensor3, mask: &ObservationMask) -> Result<Tensor3> {
    mask.check_tensor(y)?;
    let n = mask.count();
    if n == 0 {
        return Err(Error::invalid("observation mask is empty"));
    }
    let obs = mask.as_slice();
    let mean = y.data().iter().zip(obs).filter(|(_, &o)| o).map(|(v, _)| v).sum::<f64>() / n as f64;
    let mut out = y.clone();
    for (v, &o) in out.data_mut().iter_mut().zip(obs) {
        if !o {
            *v = mean;
        }
    }
    Ok(out)
}
