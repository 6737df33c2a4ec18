//! Same-padded 2-D convolution over channel-major planes, via im2col and GEMM.
//!
//! An activation with `c` channels on an `h x w` grid is a `c x (h w)` row-major
//! matrix. Zero padding keeps the spatial size.

use alloc::vec;
use alloc::vec::Vec;

use super::params::ConvSlot;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Grid {
    pub height: usize,
    pub width: usize,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.height * self.width
    }
}

/// Unfolds `input` (`cin x hw`) into `(cin k k) x hw` patch columns.
pub(crate) fn im2col(input: &[f64], cin: usize, k: usize, grid: Grid, cols: &mut Vec<f64>) {
    let (h, w) = (grid.height, grid.width);
    let hw = grid.len();
    let r = (k / 2) as isize;
    cols.clear();
    cols.resize(cin * k * k * hw, 0.0);
    for ci in 0..cin {
        let plane = &input[ci * hw..(ci + 1) * hw];
        for ky in 0..k {
            let dy = ky as isize - r;
            for kx in 0..k {
                let dx = kx as isize - r;
                let row = ((ci * k + ky) * k + kx) * hw;
                let out = &mut cols[row..row + hw];
                let y_lo = (-dy).max(0) as usize;
                let y_hi = (h as isize - dy).min(h as isize).max(0) as usize;
                let x_lo = (-dx).max(0) as usize;
                let x_hi = (w as isize - dx).min(w as isize).max(0) as usize;
                if x_lo >= x_hi {
                    continue;
                }
                for y in y_lo..y_hi {
                    let sy = (y as isize + dy) as usize;
                    let src = &plane[sy * w..(sy + 1) * w];
                    let dst = &mut out[y * w..(y + 1) * w];
                    let sx_lo = (x_lo as isize + dx) as usize;
                    dst[x_lo..x_hi].copy_from_slice(&src[sx_lo..sx_lo + (x_hi - x_lo)]);
                }
            }
        }
    }
}

/// Adjoint of [`im2col`]: folds columns back, accumulating into `out` (`cin x hw`).
pub(crate) fn col2im_acc(cols: &[f64], cin: usize, k: usize, grid: Grid, out: &mut [f64]) {
    let (h, w) = (grid.height, grid.width);
    let hw = grid.len();
    let r = (k / 2) as isize;
    for ci in 0..cin {
        let plane = &mut out[ci * hw..(ci + 1) * hw];
        for ky in 0..k {
            let dy = ky as isize - r;
            for kx in 0..k {
                let dx = kx as isize - r;
                let row = ((ci * k + ky) * k + kx) * hw;
                let src = &cols[row..row + hw];
                let y_lo = (-dy).max(0) as usize;
                let y_hi = (h as isize - dy).min(h as isize).max(0) as usize;
                let x_lo = (-dx).max(0) as usize;
                let x_hi = (w as isize - dx).min(w as isize).max(0) as usize;
                if x_lo >= x_hi {
                    continue;
                }
                for y in y_lo..y_hi {
                    let sy = (y as isize + dy) as usize;
                    let sx_lo = (x_lo as isize + dx) as usize;
                    let dst = &mut plane[sy * w + sx_lo..sy * w + sx_lo + (x_hi - x_lo)];
                    for (d, s) in dst.iter_mut().zip(&src[y * w + x_lo..y * w + x_hi]) {
                        *d += s;
                    }
                }
            }
        }
    }
}

/// `c (m x n) = alpha * a (m x k) * b (k x n) + beta * c`, all row-major, with
/// optional transposition of `a` or `b` expressed through strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    a_trans: bool,
    b: &[f64],
    b_trans: bool,
    beta: f64,
    c: &mut [f64],
) {
    assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    let (rsa, csa) = if a_trans { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if b_trans { (1, k as isize) } else { (n as isize, 1) };
    // SAFETY: the asserts above bound every index the strides can reach, and `c`
    // does not alias `a` or `b` (distinct borrows).
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `out = W * cols + b`, with `cols` from [`im2col`] of this layer's input.
pub(crate) fn forward(slot: &ConvSlot, weights: &[f64], bias: &[f64], cols: &[f64], hw: usize) -> Vec<f64> {
    let mut out = vec![0.0; slot.out_channels * hw];
    for (row, &b) in out.chunks_exact_mut(hw).zip(bias) {
        row.fill(b);
    }
    gemm(slot.out_channels, slot.fan_in(), hw, weights, false, cols, false, 1.0, &mut out);
    out
}

/// Accumulates weight and bias gradients for `dout` (`out x hw`).
pub(crate) fn backward_params(
    slot: &ConvSlot,
    dout: &[f64],
    cols: &[f64],
    hw: usize,
    dweights: &mut [f64],
    dbias: &mut [f64],
) {
    gemm(slot.out_channels, hw, slot.fan_in(), dout, false, cols, true, 1.0, dweights);
    for (db, row) in dbias.iter_mut().zip(dout.chunks_exact(hw)) {
        *db += row.iter().sum::<f64>();
    }
}

/// Gradient with respect to the patch columns, `W^T * dout`.
pub(crate) fn backward_cols(slot: &ConvSlot, weights: &[f64], dout: &[f64], hw: usize) -> Vec<f64> {
    let mut dcols = vec![0.0; slot.fan_in() * hw];
    gemm(slot.fan_in(), slot.out_channels, hw, weights, true, dout, false, 0.0, &mut dcols);
    dcols
}
