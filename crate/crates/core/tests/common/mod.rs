#![allow(dead_code)]

use ngr_core::{Axis, Shape, Tensor3};

/// Row-major dense matrix.
pub struct Dense {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut d = Self::zeros(n);
        for i in 0..n {
            d.a[i * n + i] = 1.0;
        }
        d
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.at(i, j) * x[j]).sum()).collect()
    }

    pub fn transpose(&self) -> Dense {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.a[j * self.n + i] = self.at(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, o: &Dense) -> Dense {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let v = self.at(i, k);
                if v != 0.0 {
                    for j in 0..n {
                        m.a[i * n + j] += v * o.at(k, j);
                    }
                }
            }
        }
        m
    }

    pub fn add_scaled(&mut self, s: f64, o: &Dense) {
        for (a, b) in self.a.iter_mut().zip(&o.a) {
            *a += s * b;
        }
    }

    /// Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut a = self.a.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs())).unwrap();
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for i in col + 1..n {
                let f = a[i * n + col] / d;
                if f != 0.0 {
                    for j in col..n {
                        a[i * n + j] -= f * a[col * n + j];
                    }
                    x[i] -= f * x[col];
                }
            }
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / a[i * n + i];
        }
        x
    }
}

/// Explicit circular forward-difference matrix along `axis`, built from
/// coordinates rather than from the library's operators.
pub fn difference_matrix(shape: Shape, axis: Axis) -> Dense {
    let (h, w, c) = (shape.height, shape.width, shape.channels);
    let idx = |y: usize, x: usize, k: usize| k * h * w + y * w + x;
    let mut d = Dense::zeros(shape.len());
    for k in 0..c {
        for y in 0..h {
            for x in 0..w {
                let (ny, nx, nk) = match axis {
                    Axis::H => ((y + 1) % h, x, k),
                    Axis::V => (y, (x + 1) % w, k),
                    Axis::T => (y, x, (k + 1) % c),
                };
                let row = idx(y, x, k);
                d.a[row * d.n + idx(ny, nx, nk)] += 1.0;
                d.a[row * d.n + row] -= 1.0;
            }
        }
    }
    d
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

pub fn max_abs_diff(a: &Tensor3, b: &Tensor3) -> f64 {
    a.data().iter().zip(b.data()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
