//! Seeded randomness.
//!
//! The generator is ChaCha8 keyed by the 64-bit seed (`ChaCha8Rng::seed_from_u64`),
//! so a seed replays the same stream on every platform. Uniform reals use the top 53
//! bits of a `u64`; normals use Box-Muller, consuming two uniforms per pair.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::tensor::{Shape, Tensor3};

#[derive(Debug, Clone)]
pub struct Rng {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { inner: ChaCha8Rng::seed_from_u64(seed), spare_normal: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`. Callers guarantee `lo < hi`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        let v = lo + (hi - lo) * self.next_f64();
        // rounding can land exactly on hi for very narrow intervals
        if v >= hi {
            lo
        } else {
            v
        }
    }

    /// Uniform integer in `0..n`, unbiased.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.inner.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal sample.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u keeps the log argument in (0, 1]
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.spare_normal = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    /// `k` distinct indices from `0..n` in selection order (partial Fisher-Yates).
    ///
    /// # Panics
    /// If `k > n`.
    pub fn choose_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot choose {k} of {n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }

    /// Tensor of i.i.d. samples in `[lo, hi)`.
    pub fn uniform(&mut self, shape: Shape, lo: f64, hi: f64) -> Result<Tensor3> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("uniform requires finite lo < hi"));
        }
        shape.validate()?;
        let data = (0..shape.len()).map(|_| self.range(lo, hi)).collect();
        Tensor3::from_vec(shape, data)
    }
}
