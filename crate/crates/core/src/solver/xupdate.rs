//! The image update: `(mu + sum_i lambda_i grad_i^T grad_i) X = R`, solved exactly
//! in the Fourier domain under periodic boundaries.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fft::{ComplexTensor3, Plan3d};
use crate::net::AxisWeights;
use crate::tensor::{grad_spectrum, Axis, Shape, Tensor3};

/// Cached FFT plan and per-axis spectra for one shape and one set of weights.
#[derive(Debug, Clone)]
pub struct ScreenedPoisson {
    plan: Plan3d,
    mu: f64,
    lambda: AxisWeights,
    spec_h: Vec<f64>,
    spec_v: Vec<f64>,
    spec_t: Vec<f64>,
}

impl ScreenedPoisson {
    pub fn new(shape: Shape, lambda: AxisWeights, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::invalid("mu must be positive"));
        }
        lambda.validate()?;
        shape.validate()?;
        Ok(ScreenedPoisson {
            plan: Plan3d::new(shape),
            mu,
            lambda,
            spec_h: grad_spectrum(shape.extent(Axis::H)),
            spec_v: grad_spectrum(shape.extent(Axis::V)),
            spec_t: grad_spectrum(shape.extent(Axis::T)),
        })
    }

    pub fn shape(&self) -> Shape {
        self.plan.shape()
    }

    /// Denominator at frequency `(ky, kx, kc)`, broadcast from the axis spectra.
    pub fn denominator(&self, ky: usize, kx: usize, kc: usize) -> f64 {
        self.mu
            + self.lambda.h * self.spec_h[ky]
            + self.lambda.v * self.spec_v[kx]
            + self.lambda.t * self.spec_t[kc]
    }

    pub fn solve(&self, rhs: &Tensor3) -> Result<Tensor3> {
        if rhs.shape() != self.shape() {
            return Err(Error::ShapeMismatch { expected: self.shape(), found: rhs.shape() });
        }
        if self.lambda.h == 0.0 && self.lambda.v == 0.0 && self.lambda.t == 0.0 {
            return Ok(rhs.map(|v| v / self.mu));
        }
        let shape = self.shape();
        let mut z = ComplexTensor3::from_real(rhs);
        self.plan.forward(&mut z);
        let data = z.data_mut();
        for kc in 0..shape.channels {
            for ky in 0..shape.height {
                let row = kc * shape.plane() + ky * shape.width;
                for kx in 0..shape.width {
                    data[row + kx] /= self.denominator(ky, kx, kc);
                }
            }
        }
        self.plan.inverse(&mut z);
        Ok(z.to_real())
    }
}

/// One-shot solve; builds the plan on every call.
pub fn update_x(rhs: &Tensor3, lambda: &AxisWeights, mu: f64) -> Result<Tensor3> {
    ScreenedPoisson::new(rhs.shape(), *lambda, mu)?.solve(rhs)
}
