//! Forward pass and reverse-mode gradients of the gradient-prediction network.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use super::config::{NetConfig, Normalization};
use super::conv::{self, Grid};
use super::params::NetParams;
use crate::error::{Error, Result};
use crate::tensor::{Axis, Shape, Tensor3};

const NORM_EPS: f64 = 1e-5;

/// Predicted (or target) gradient maps along the three axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientTriple {
    pub h: Tensor3,
    pub v: Tensor3,
    pub t: Tensor3,
}

impl GradientTriple {
    pub fn zeros(shape: Shape) -> Self {
        GradientTriple { h: Tensor3::zeros(shape), v: Tensor3::zeros(shape), t: Tensor3::zeros(shape) }
    }

    /// Gradients of `x` along every axis.
    pub fn of(x: &Tensor3) -> Self {
        GradientTriple {
            h: crate::tensor::grad(x, Axis::H),
            v: crate::tensor::grad(x, Axis::V),
            t: crate::tensor::grad(x, Axis::T),
        }
    }

    pub fn shape(&self) -> Shape {
        self.h.shape()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Axis, &Tensor3)> {
        [(Axis::H, &self.h), (Axis::V, &self.v), (Axis::T, &self.t)].into_iter()
    }

    pub fn norm_sq(&self) -> f64 {
        self.h.norm_sq() + self.v.norm_sq() + self.t.norm_sq()
    }

    fn check(&self, shape: Shape) -> Result<()> {
        for (_, g) in self.iter() {
            if g.shape() != shape {
                return Err(Error::ShapeMismatch { expected: shape, found: g.shape() });
            }
        }
        Ok(())
    }
}

impl Index<Axis> for GradientTriple {
    type Output = Tensor3;
    fn index(&self, axis: Axis) -> &Tensor3 {
        match axis {
            Axis::H => &self.h,
            Axis::V => &self.v,
            Axis::T => &self.t,
        }
    }
}

impl IndexMut<Axis> for GradientTriple {
    fn index_mut(&mut self, axis: Axis) -> &mut Tensor3 {
        match axis {
            Axis::H => &mut self.h,
            Axis::V => &mut self.v,
            Axis::T => &mut self.t,
        }
    }
}

/// Per-axis penalty weights `(lambda_h, lambda_v, lambda_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisWeights {
    pub h: f64,
    pub v: f64,
    pub t: f64,
}

impl AxisWeights {
    pub const ONES: AxisWeights = AxisWeights { h: 1.0, v: 1.0, t: 1.0 };

    pub fn new(h: f64, v: f64, t: f64) -> Self {
        AxisWeights { h, v, t }
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::H => self.h,
            Axis::V => self.v,
            Axis::T => self.t,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        AxisWeights { h: self.h * s, v: self.v * s, t: self.t * s }
    }

    pub fn validate(&self) -> Result<()> {
        for a in Axis::ALL {
            let w = self.get(a);
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::invalid("axis weights must be finite and nonnegative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct TrunkRecord {
    /// Normalized pre-activation (the raw conv output when normalization is off).
    normed: Vec<f64>,
    inv_std: Vec<f64>,
    /// Post-activation output, the next layer's input.
    act: Vec<f64>,
}

/// Activations kept from a forward pass so gradients can be taken later.
///
/// The tape depends only on the parameters and the input, so one tape serves any
/// number of targets.
#[derive(Debug, Clone)]
pub struct Tape {
    grid: Grid,
    input: Vec<f64>,
    trunk: Vec<TrunkRecord>,
    trunk_out: Vec<f64>,
    output: GradientTriple,
}

impl Tape {
    pub fn output(&self) -> &GradientTriple {
        &self.output
    }

    pub fn into_output(self) -> GradientTriple {
        self.output
    }
}

fn check_input(cfg: &NetConfig, input: &Tensor3) -> Result<()> {
    if input.shape().channels != cfg.input_channels {
        return Err(Error::ShapeMismatch {
            expected: input.shape().with_channels(cfg.input_channels),
            found: input.shape(),
        });
    }
    Ok(())
}

fn check_params(params: &NetParams, cfg: &NetConfig) -> Result<()> {
    if params.config() != cfg {
        return Err(Error::invalid("parameters were built for a different config"));
    }
    Ok(())
}

/// Runs the network and keeps what the backward pass needs.
pub fn forward_tape(params: &NetParams, cfg: &NetConfig, input: &Tensor3) -> Result<Tape> {
    check_params(params, cfg)?;
    check_input(cfg, input)?;
    let shape = input.shape();
    let grid = Grid { height: shape.height, width: shape.width };
    let hw = grid.len();
    let k = cfg.kernel;
    let slope = cfg.leaky_slope;

    let mut cols = Vec::new();
    let mut trunk: Vec<TrunkRecord> = Vec::with_capacity(cfg.blocks);
    for (b, slot) in params.trunk_slots().iter().enumerate() {
        let x: &[f64] = if b == 0 { input.data() } else { &trunk[b - 1].act };
        conv::im2col(x, slot.in_channels, k, grid, &mut cols);
        let mut z = conv::forward(slot, params.weights(slot), params.bias(slot), &cols, hw);
        let mut inv_std = Vec::new();
        if cfg.normalization == Normalization::PerChannel {
            inv_std.reserve(slot.out_channels);
            for row in z.chunks_exact_mut(hw) {
                let mean = row.iter().sum::<f64>() / hw as f64;
                let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / hw as f64;
                let s = 1.0 / libm::sqrt(var + NORM_EPS);
                row.iter_mut().for_each(|v| *v = (*v - mean) * s);
                inv_std.push(s);
            }
        }
        let act = z.iter().map(|&v| if v > 0.0 { v } else { slope * v }).collect();
        trunk.push(TrunkRecord { normed: z, inv_std, act });
    }
    let mut trunk_out = trunk[cfg.blocks - 1].act.clone();
    if cfg.skip && cfg.blocks > 1 {
        for (o, a) in trunk_out.iter_mut().zip(&trunk[0].act) {
            *o += a;
        }
    }

    let out_shape = shape.with_channels(cfg.output_channels);
    conv::im2col(&trunk_out, cfg.width, k, grid, &mut cols);
    let mut output = GradientTriple::zeros(out_shape);
    for axis in Axis::ALL {
        let slot = params.head_slot(axis);
        let y = conv::forward(&slot, params.weights(&slot), params.bias(&slot), &cols, hw);
        output[axis] = Tensor3::from_vec(out_shape, y)
            .map_err(|_| Error::NonFinite { stage: "network forward", iteration: 0 })?;
    }

    Ok(Tape { grid, input: input.data().to_vec(), trunk, trunk_out, output })
}

/// Predicted gradient maps `(f_h, f_v, f_t)` for `input`.
pub fn forward(params: &NetParams, cfg: &NetConfig, input: &Tensor3) -> Result<GradientTriple> {
    forward_tape(params, cfg, input).map(Tape::into_output)
}

/// `sum_i lambda_i / 2 * |target_i - pred_i|^2`.
pub fn penalty(pred: &GradientTriple, target: &GradientTriple, lambda: &AxisWeights) -> f64 {
    Axis::ALL
        .iter()
        .map(|&a| {
            let d: f64 = pred[a]
                .data()
                .iter()
                .zip(target[a].data())
                .map(|(p, t)| (p - t) * (p - t))
                .sum();
            0.5 * lambda.get(a) * d
        })
        .sum()
}

/// Loss and exact parameter gradients for a recorded forward pass.
pub fn backward(
    params: &NetParams,
    cfg: &NetConfig,
    tape: &Tape,
    target: &GradientTriple,
    lambda: &AxisWeights,
) -> Result<(f64, NetParams)> {
    check_params(params, cfg)?;
    lambda.validate()?;
    target.check(tape.output.shape())?;
    let grid = tape.grid;
    let hw = grid.len();
    let k = cfg.kernel;
    let slope = cfg.leaky_slope;
    let mut grads = params.zeros_like();
    let loss = penalty(&tape.output, target, lambda);

    // heads
    let mut cols = Vec::new();
    conv::im2col(&tape.trunk_out, cfg.width, k, grid, &mut cols);
    let mut dtrunk_cols = vec![0.0; cfg.width * k * k * hw];
    for axis in Axis::ALL {
        let slot = params.head_slot(axis);
        let w = lambda.get(axis);
        let dout: Vec<f64> = tape.output[axis]
            .data()
            .iter()
            .zip(target[axis].data())
            .map(|(p, t)| w * (p - t))
            .collect();
        let (dw, db) = split_slot(grads.as_mut_slice(), &slot);
        conv::backward_params(&slot, &dout, &cols, hw, dw, db);
        let dc = conv::backward_cols(&slot, params.weights(&slot), &dout, hw);
        dtrunk_cols.iter_mut().zip(&dc).for_each(|(a, b)| *a += b);
    }
    let mut dtrunk = vec![0.0; cfg.width * hw];
    conv::col2im_acc(&dtrunk_cols, cfg.width, k, grid, &mut dtrunk);

    // trunk, last block first
    let mut dact = dtrunk.clone();
    for b in (0..cfg.blocks).rev() {
        let slot = params.trunk_slots()[b];
        let rec = &tape.trunk[b];
        if b == 0 && cfg.skip && cfg.blocks > 1 {
            dact.iter_mut().zip(&dtrunk).for_each(|(a, d)| *a += d);
        }
        // leaky relu
        let mut dz: Vec<f64> = dact
            .iter()
            .zip(&rec.normed)
            .map(|(&d, &z)| if z > 0.0 { d } else { slope * d })
            .collect();
        if cfg.normalization == Normalization::PerChannel {
            for ((drow, yrow), &s) in dz.chunks_exact_mut(hw).zip(rec.normed.chunks_exact(hw)).zip(&rec.inv_std) {
                let mean_d = drow.iter().sum::<f64>() / hw as f64;
                let mean_dy = drow.iter().zip(yrow).map(|(d, y)| d * y).sum::<f64>() / hw as f64;
                for (d, &y) in drow.iter_mut().zip(yrow) {
                    *d = s * (*d - mean_d - y * mean_dy);
                }
            }
        }
        let x: &[f64] = if b == 0 { &tape.input } else { &tape.trunk[b - 1].act };
        conv::im2col(x, slot.in_channels, k, grid, &mut cols);
        let (dw, db) = split_slot(grads.as_mut_slice(), &slot);
        conv::backward_params(&slot, &dz, &cols, hw, dw, db);
        if b > 0 {
            let dc = conv::backward_cols(&slot, params.weights(&slot), &dz, hw);
            dact.clear();
            dact.resize(slot.in_channels * hw, 0.0);
            conv::col2im_acc(&dc, slot.in_channels, k, grid, &mut dact);
        }
    }
    Ok((loss, grads))
}

fn split_slot<'a>(buf: &'a mut [f64], slot: &super::params::ConvSlot) -> (&'a mut [f64], &'a mut [f64]) {
    let (w, rest) = buf[slot.weight_offset..].split_at_mut(slot.weight_len());
    (w, &mut rest[..slot.out_channels])
}

/// Penalty `sum_i lambda_i/2 |target_i - f_i(input)|^2` and its gradient with
/// respect to every parameter.
pub fn loss_and_grad(
    params: &NetParams,
    cfg: &NetConfig,
    input: &Tensor3,
    target: &GradientTriple,
    lambda: &AxisWeights,
) -> Result<(f64, NetParams)> {
    lambda.validate()?;
    let tape = forward_tape(params, cfg, input)?;
    backward(params, cfg, &tape, target, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn tiny() -> NetConfig {
        NetConfig { blocks: 2, width: 4, ..NetConfig::for_channels(2) }
    }

    #[test]
    fn zero_params_give_zero_output() {
        let cfg = tiny();
        let p = NetParams::zeros(&cfg).unwrap();
        let input = Rng::new(1).uniform(Shape::new(6, 6, 2), 0.0, 0.1).unwrap();
        let out = forward(&p, &cfg, &input).unwrap();
        assert_eq!(out.norm_sq(), 0.0);
    }

    #[test]
    fn output_shapes_follow_the_image() {
        for (kernel, skip, norm) in [(3, true, Normalization::PerChannel), (5, false, Normalization::None), (1, true, Normalization::None)] {
            let cfg = NetConfig { blocks: 3, width: 5, kernel, skip, normalization: norm, ..NetConfig::for_channels(3) };
            let p = NetParams::init(&mut Rng::new(2), &cfg).unwrap();
            let input = Rng::new(3).uniform(Shape::new(7, 9, 3), 0.0, 0.1).unwrap();
            let out = forward(&p, &cfg, &input).unwrap();
            for (_, g) in out.iter() {
                assert_eq!(g.shape(), Shape::new(7, 9, 3));
            }
        }
    }

    #[test]
    fn wrong_input_channels_rejected() {
        let cfg = tiny();
        let p = NetParams::zeros(&cfg).unwrap();
        let input = Tensor3::zeros(Shape::new(4, 4, 3));
        assert!(matches!(forward(&p, &cfg, &input), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn fitted_target_has_zero_loss_and_gradient() {
        let cfg = tiny();
        let p = NetParams::init(&mut Rng::new(4), &cfg).unwrap();
        let input = Rng::new(5).uniform(Shape::new(6, 6, 2), 0.0, 0.1).unwrap();
        let target = forward(&p, &cfg, &input).unwrap();
        let (loss, g) = loss_and_grad(&p, &cfg, &input, &target, &AxisWeights::ONES).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn loss_and_grad_are_linear_in_lambda() {
        let cfg = tiny();
        let p = NetParams::init(&mut Rng::new(6), &cfg).unwrap();
        let shape = Shape::new(6, 6, 2);
        let input = Rng::new(7).uniform(shape, 0.0, 0.1).unwrap();
        let mut rng = Rng::new(8);
        let target = GradientTriple {
            h: rng.uniform(shape, -1.0, 1.0).unwrap(),
            v: rng.uniform(shape, -1.0, 1.0).unwrap(),
            t: rng.uniform(shape, -1.0, 1.0).unwrap(),
        };
        let lam = AxisWeights::new(0.5, 1.5, 0.25);
        let (l1, g1) = loss_and_grad(&p, &cfg, &input, &target, &lam).unwrap();
        let (l2, g2) = loss_and_grad(&p, &cfg, &input, &target, &lam.scaled(2.0)).unwrap();
        assert!((l2 - 2.0 * l1).abs() <= 1e-12 * l1);
        for (a, b) in g1.as_slice().iter().zip(g2.as_slice()) {
            assert!((b - 2.0 * a).abs() <= 1e-12 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn negative_lambda_rejected() {
        let cfg = tiny();
        let p = NetParams::zeros(&cfg).unwrap();
        let input = Tensor3::zeros(Shape::new(4, 4, 2));
        let target = GradientTriple::zeros(Shape::new(4, 4, 2));
        let lam = AxisWeights::new(1.0, -1.0, 1.0);
        assert!(loss_and_grad(&p, &cfg, &input, &target, &lam).is_err());
    }
}
