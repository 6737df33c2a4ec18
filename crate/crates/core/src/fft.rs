//! 3-D discrete Fourier transform over [`Tensor3`].
//!
//! Forward transforms are unnormalized, inverses carry the `1/(H W C)` factor.
//! Lengths that are powers of two go through an iterative radix-2 kernel, every
//! other length through Bluestein's chirp-z reformulation on a padded radix-2 size.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::tensor::{Axis, Shape, Tensor3};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor3 {
    shape: Shape,
    data: Vec<Complex64>,
}

impl ComplexTensor3 {
    pub fn zeros(shape: Shape) -> Self {
        ComplexTensor3 { shape, data: vec![Complex64::new(0.0, 0.0); shape.len()] }
    }

    pub fn from_real(x: &Tensor3) -> Self {
        ComplexTensor3 {
            shape: x.shape(),
            data: x.data().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, y: usize, x: usize, c: usize) -> Complex64 {
        self.data[self.shape.index(y, x, c)]
    }

    /// Real parts; the imaginary parts are dropped.
    pub fn to_real(&self) -> Tensor3 {
        let mut t = Tensor3::zeros(self.shape);
        for (d, z) in t.data_mut().iter_mut().zip(&self.data) {
            *d = z.re;
        }
        t
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Identity,
    Radix2 { twiddles: Vec<Complex64>, bitrev: Vec<usize> },
    Bluestein { chirp: Vec<Complex64>, filter: Vec<Complex64>, inner: Box<Plan1d> },
}

/// Unnormalized 1-D DFT of a fixed length.
#[derive(Debug, Clone)]
pub struct Plan1d {
    n: usize,
    kernel: Kernel,
}

impl Plan1d {
    /// # Panics
    /// If `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "DFT length must be positive");
        let kernel = if n == 1 {
            Kernel::Identity
        } else if n.is_power_of_two() {
            Self::radix2(n)
        } else {
            Self::bluestein(n)
        };
        Plan1d { n, kernel }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn radix2(n: usize) -> Kernel {
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -2.0 * core::f64::consts::PI * k as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n).map(|i| i.reverse_bits() >> (usize::BITS - bits)).collect();
        Kernel::Radix2 { twiddles, bitrev }
    }

    fn bluestein(n: usize) -> Kernel {
        let m = (2 * n - 1).next_power_of_two();
        // chirp[k] = exp(-i pi k^2 / n); k^2 is reduced mod 2n to keep the angle small
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
                let a = -core::f64::consts::PI * k2 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let inner = Plan1d::new(m);
        let mut filter = vec![Complex64::new(0.0, 0.0); m];
        filter[0] = chirp[0].conj();
        for k in 1..n {
            filter[k] = chirp[k].conj();
            filter[m - k] = chirp[k].conj();
        }
        inner.forward(&mut filter);
        Kernel::Bluestein { chirp, filter, inner: Box::new(inner) }
    }

    /// In-place forward transform, `X_k = sum_j x_j exp(-2 pi i jk/n)`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        match &self.kernel {
            Kernel::Identity => {}
            Kernel::Radix2 { twiddles, bitrev } => {
                for (i, &j) in bitrev.iter().enumerate() {
                    if i < j {
                        buf.swap(i, j);
                    }
                }
                let n = self.n;
                let mut len = 2;
                while len <= n {
                    let half = len / 2;
                    let step = n / len;
                    for start in (0..n).step_by(len) {
                        for j in 0..half {
                            let w = twiddles[j * step];
                            let u = buf[start + j];
                            let v = buf[start + j + half] * w;
                            buf[start + j] = u + v;
                            buf[start + j + half] = u - v;
                        }
                    }
                    len <<= 1;
                }
            }
            Kernel::Bluestein { chirp, filter, inner } => {
                let m = filter.len();
                let mut work = vec![Complex64::new(0.0, 0.0); m];
                for (w, (&x, &c)) in work.iter_mut().zip(buf.iter().zip(chirp)) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, &f) in work.iter_mut().zip(filter) {
                    *w *= f;
                }
                inner.inverse_unnormalized(&mut work);
                let scale = 1.0 / m as f64;
                for (k, out) in buf.iter_mut().enumerate() {
                    *out = work[k] * chirp[k] * scale;
                }
            }
        }
    }

    /// In-place inverse transform without the `1/n` factor.
    pub fn inverse_unnormalized(&self, buf: &mut [Complex64]) {
        buf.iter_mut().for_each(|z| *z = z.conj());
        self.forward(buf);
        buf.iter_mut().for_each(|z| *z = z.conj());
    }
}

/// Precomputed 1-D plans for the three axes of one shape.
#[derive(Debug, Clone)]
pub struct Plan3d {
    shape: Shape,
    plans: [Plan1d; 3],
}

impl Plan3d {
    pub fn new(shape: Shape) -> Self {
        Plan3d {
            shape,
            plans: [
                Plan1d::new(shape.height),
                Plan1d::new(shape.width),
                Plan1d::new(shape.channels),
            ],
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn forward(&self, z: &mut ComplexTensor3) {
        self.apply(z, false);
    }

    /// Inverse including the `1/(H W C)` normalization.
    pub fn inverse(&self, z: &mut ComplexTensor3) {
        self.apply(z, true);
        let scale = 1.0 / self.shape.len() as f64;
        z.data.iter_mut().for_each(|v| *v *= scale);
    }

    fn apply(&self, z: &mut ComplexTensor3, inverse: bool) {
        assert_eq!(z.shape, self.shape, "plan shape mismatch");
        let shape = self.shape;
        let mut line = Vec::new();
        for (axis, plan) in Axis::ALL.iter().zip(&self.plans) {
            let n = shape.extent(*axis);
            if n == 1 {
                continue;
            }
            let stride = shape.stride(*axis);
            line.resize(n, Complex64::new(0.0, 0.0));
            let starts: Vec<usize> = match axis {
                Axis::H => (0..shape.channels)
                    .flat_map(|c| (0..shape.width).map(move |x| shape.index(0, x, c)))
                    .collect(),
                Axis::V => (0..shape.channels)
                    .flat_map(|c| (0..shape.height).map(move |y| shape.index(y, 0, c)))
                    .collect(),
                Axis::T => (0..shape.plane()).collect(),
            };
            for start in starts {
                for (k, l) in line.iter_mut().enumerate() {
                    *l = z.data[start + k * stride];
                }
                if inverse {
                    plan.inverse_unnormalized(&mut line);
                } else {
                    plan.forward(&mut line);
                }
                for (k, l) in line.iter().enumerate() {
                    z.data[start + k * stride] = *l;
                }
            }
        }
    }
}

/// Unnormalized forward 3-D DFT.
pub fn fft3(x: &Tensor3) -> ComplexTensor3 {
    let mut z = ComplexTensor3::from_real(x);
    Plan3d::new(x.shape()).forward(&mut z);
    z
}

/// Normalized inverse 3-D DFT, keeping the real part.
pub fn ifft3(z: &ComplexTensor3) -> Tensor3 {
    let mut w = z.clone();
    Plan3d::new(z.shape()).inverse(&mut w);
    w.to_real()
}
