//! Proximal map of the l1 norm.

use crate::tensor::Tensor3;

#[inline]
pub fn shrink(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Elementwise `sign(x) * max(|x| - tau, 0)`.
///
/// # Panics
/// If `tau` is negative or NaN.
pub fn soft_threshold(x: &Tensor3, tau: f64) -> Tensor3 {
    assert!(tau >= 0.0, "threshold must be nonnegative");
    x.map(|v| shrink(v, tau))
}
