//! Dense `H x W x C` volumes and the circular difference operators.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl Shape {
    pub const fn new(height: usize, width: usize, channels: usize) -> Self {
        Shape { height, width, channels }
    }

    pub const fn len(&self) -> usize {
        self.height * self.width * self.channels
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of elements in one channel plane.
    pub const fn plane(&self) -> usize {
        self.height * self.width
    }

    pub const fn with_channels(&self, channels: usize) -> Self {
        Shape { channels, ..*self }
    }

    pub const fn index(&self, y: usize, x: usize, c: usize) -> usize {
        c * self.height * self.width + y * self.width + x
    }

    /// Extent along `axis`.
    pub const fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::H => self.height,
            Axis::V => self.width,
            Axis::T => self.channels,
        }
    }

    /// Distance in the flat buffer between neighbours along `axis`.
    pub const fn stride(&self, axis: Axis) -> usize {
        match axis {
            Axis::H => self.width,
            Axis::V => 1,
            Axis::T => self.height * self.width,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 || self.channels == 0 {
            return Err(Error::invalid("tensor dimensions must be positive"));
        }
        Ok(())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.height, self.width, self.channels)
    }
}

/// The three differencing directions: `H` runs down the rows (height), `V` along
/// a row (width), `T` across channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    H,
    V,
    T,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::H, Axis::V, Axis::T];

    pub const fn name(self) -> &'static str {
        match self {
            Axis::H => "h",
            Axis::V => "v",
            Axis::T => "t",
        }
    }
}

/// Dense real volume, channel-major planes, row-major within a plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    shape: Shape,
    data: Vec<f64>,
}

impl Tensor3 {
    /// # Panics
    /// If any dimension is zero.
    pub fn zeros(shape: Shape) -> Self {
        Self::filled(shape, 0.0)
    }

    pub fn filled(shape: Shape, value: f64) -> Self {
        assert!(!shape.is_empty(), "tensor dimensions must be positive");
        Tensor3 { shape, data: vec![value; shape.len()] }
    }

    /// Wraps a buffer, rejecting a wrong length or non-finite entries.
    pub fn from_vec(shape: Shape, data: Vec<f64>) -> Result<Self> {
        shape.validate()?;
        if data.len() != shape.len() {
            return Err(Error::invalid("buffer length does not match shape"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("tensor entries must be finite"));
        }
        Ok(Tensor3 { shape, data })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(shape);
        for c in 0..shape.channels {
            for y in 0..shape.height {
                for x in 0..shape.width {
                    t.data[shape.index(y, x, c)] = f(y, x, c);
                }
            }
        }
        t
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[self.shape.index(y, x, c)]
    }

    pub fn set(&mut self, y: usize, x: usize, c: usize, value: f64) {
        let i = self.shape.index(y, x, c);
        self.data[i] = value;
    }

    /// One channel plane as a row-major slice.
    pub fn plane(&self, c: usize) -> &[f64] {
        let p = self.shape.plane();
        &self.data[c * p..(c + 1) * p]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f64] {
        let p = self.shape.plane();
        &mut self.data[c * p..(c + 1) * p]
    }

    pub fn check_same_shape(&self, other: &Tensor3) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch { expected: self.shape, found: other.shape });
        }
        Ok(())
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Tensor3 {
        Tensor3 { shape: self.shape, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Elementwise combination; shapes must agree.
    ///
    /// # Panics
    /// On shape mismatch.
    pub fn zip_map(&self, other: &Tensor3, mut f: impl FnMut(f64, f64) -> f64) -> Tensor3 {
        assert_eq!(self.shape, other.shape, "zip_map shape mismatch");
        Tensor3 {
            shape: self.shape,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Tensor3) {
        assert_eq!(self.shape, other.shape, "axpy shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn dot(&self, other: &Tensor3) -> f64 {
        assert_eq!(self.shape, other.shape, "dot shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn clamp(&mut self, lo: f64, hi: f64) {
        self.data.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    }
}

impl Index<usize> for Tensor3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Tensor3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// Visits every 1-D line along `axis`, handing over the flat index of its first
/// element, the stride and the line length.
fn for_each_line(shape: Shape, axis: Axis, mut f: impl FnMut(usize, usize, usize)) {
    let n = shape.extent(axis);
    let stride = shape.stride(axis);
    match axis {
        Axis::H => {
            for c in 0..shape.channels {
                for x in 0..shape.width {
                    f(shape.index(0, x, c), stride, n);
                }
            }
        }
        Axis::V => {
            for c in 0..shape.channels {
                for y in 0..shape.height {
                    f(shape.index(y, 0, c), stride, n);
                }
            }
        }
        Axis::T => {
            for p in 0..shape.plane() {
                f(p, stride, n);
            }
        }
    }
}

/// Circular forward difference: `out[k] = x[k+1 mod n] - x[k]` along `axis`.
pub fn grad(x: &Tensor3, axis: Axis) -> Tensor3 {
    let mut out = Tensor3::zeros(x.shape);
    grad_into(x, axis, &mut out);
    out
}

pub(crate) fn grad_into(x: &Tensor3, axis: Axis, out: &mut Tensor3) {
    debug_assert_eq!(x.shape, out.shape);
    let src = &x.data;
    let dst = &mut out.data;
    match axis {
        // Contiguous rows: difference the whole row at once.
        Axis::V => {
            let w = x.shape.width;
            for (s, d) in src.chunks_exact(w).zip(dst.chunks_exact_mut(w)) {
                for k in 0..w - 1 {
                    d[k] = s[k + 1] - s[k];
                }
                d[w - 1] = s[0] - s[w - 1];
            }
        }
        Axis::H | Axis::T => {
            // Whole-row (H) or whole-plane (T) blocks shifted by one position.
            let block = x.shape.stride(axis);
            let n = x.shape.extent(axis);
            let outer = src.len() / (block * n);
            for o in 0..outer {
                let base = o * block * n;
                for k in 0..n {
                    let cur = base + k * block;
                    let next = base + ((k + 1) % n) * block;
                    for j in 0..block {
                        dst[cur + j] = src[next + j] - src[cur + j];
                    }
                }
            }
        }
    }
}

/// Adjoint of [`grad`]: `out[k] = g[k-1 mod n] - g[k]`.
pub fn grad_adjoint(g: &Tensor3, axis: Axis) -> Tensor3 {
    let mut out = Tensor3::zeros(g.shape);
    grad_adjoint_acc(g, axis, 1.0, &mut out);
    out
}

/// `out += weight * grad_adjoint(g, axis)` without a temporary.
pub(crate) fn grad_adjoint_acc(g: &Tensor3, axis: Axis, weight: f64, out: &mut Tensor3) {
    debug_assert_eq!(g.shape, out.shape);
    let src = &g.data;
    let dst = &mut out.data;
    for_each_line(g.shape, axis, |start, stride, n| {
        for k in 0..n {
            let prev = start + ((k + n - 1) % n) * stride;
            let cur = start + k * stride;
            dst[cur] += weight * (src[prev] - src[cur]);
        }
    });
}

/// Squared magnitude of the DFT of the length-`n` circular forward difference,
/// `4 sin^2(pi k / n)`.
///
/// # Panics
/// If `n == 0`.
pub fn grad_spectrum(n: usize) -> Vec<f64> {
    assert!(n >= 1, "spectrum length must be positive");
    (0..n)
        .map(|k| {
            let s = libm::sin(core::f64::consts::PI * k as f64 / n as f64);
            4.0 * s * s
        })
        .collect()
}
