//! Full-reference quality metrics: PSNR, SSIM, SAM and ERGAS.
//!
//! PSNR and SSIM are computed per band and averaged over bands (the "MPSNR" /
//! "MSSIM" convention) for every kind of data. Dynamic range is 1.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::{Shape, Tensor3};

/// PSNR reported for a band that matches the reference exactly.
pub const PSNR_CAP: f64 = 100.0;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = (0.01 * 1.0) * (0.01 * 1.0);
const SSIM_C2: f64 = (0.03 * 1.0) * (0.03 * 1.0);

fn same_shape(x: &Tensor3, reference: &Tensor3) -> Result<Shape> {
    reference.check_same_shape(x)?;
    Ok(x.shape())
}

fn band_mse(x: &[f64], r: &[f64]) -> f64 {
    x.iter().zip(r).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / x.len() as f64
}

/// Mean over bands of `10 log10(1 / MSE_b)`, each band capped at [`PSNR_CAP`].
pub fn psnr(x: &Tensor3, reference: &Tensor3) -> Result<f64> {
    let shape = same_shape(x, reference)?;
    let total: f64 = (0..shape.channels)
        .map(|c| {
            let mse = band_mse(x.plane(c), reference.plane(c));
            if mse == 0.0 {
                PSNR_CAP
            } else {
                (10.0 * libm::log10(1.0 / mse)).min(PSNR_CAP)
            }
        })
        .sum();
    Ok(total / shape.channels as f64)
}

/// Normalized 1-D Gaussian taps for the SSIM window.
pub fn gaussian_window(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size / 2) as f64;
    let mut w: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - c;
            libm::exp(-d * d / (2.0 * sigma * sigma))
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Separable "valid" filtering of an `h x w` plane.
fn filter_valid(plane: &[f64], h: usize, w: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let (oh, ow) = (h - k + 1, w - k + 1);
    let mut rows = vec![0.0; h * ow];
    for y in 0..h {
        for x in 0..ow {
            rows[y * ow + x] = taps.iter().enumerate().map(|(i, t)| t * plane[y * w + x + i]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps.iter().enumerate().map(|(i, t)| t * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Per-band SSIM with an 11x11 Gaussian window (sigma 1.5), averaged over all
/// valid window positions and then over bands.
pub fn ssim(x: &Tensor3, reference: &Tensor3) -> Result<f64> {
    let shape = same_shape(x, reference)?;
    if shape.height < SSIM_WINDOW || shape.width < SSIM_WINDOW {
        return Err(Error::invalid("SSIM needs images of at least 11x11"));
    }
    let taps = gaussian_window(SSIM_WINDOW, SSIM_SIGMA);
    let (h, w) = (shape.height, shape.width);
    let mut total = 0.0;
    for c in 0..shape.channels {
        let a = x.plane(c);
        let b = reference.plane(c);
        let aa: Vec<f64> = a.iter().map(|v| v * v).collect();
        let bb: Vec<f64> = b.iter().map(|v| v * v).collect();
        let ab: Vec<f64> = a.iter().zip(b).map(|(p, q)| p * q).collect();
        let mu_a = filter_valid(a, h, w, &taps);
        let mu_b = filter_valid(b, h, w, &taps);
        let e_aa = filter_valid(&aa, h, w, &taps);
        let e_bb = filter_valid(&bb, h, w, &taps);
        let e_ab = filter_valid(&ab, h, w, &taps);
        let mut band = 0.0;
        for i in 0..mu_a.len() {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = e_aa[i] - ma * ma;
            let vb = e_bb[i] - mb * mb;
            let cov = e_ab[i] - ma * mb;
            band += ((2.0 * ma * mb + SSIM_C1) * (2.0 * cov + SSIM_C2))
                / ((ma * ma + mb * mb + SSIM_C1) * (va + vb + SSIM_C2));
        }
        total += band / mu_a.len() as f64;
    }
    Ok(total / shape.channels as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamResult {
    /// Mean spectral angle in degrees over the pixels that were scored.
    pub degrees: f64,
    /// Pixels skipped because one of the two spectra was all zero.
    pub skipped: usize,
}

/// Spectral angle mapper.
pub fn sam(x: &Tensor3, reference: &Tensor3) -> Result<SamResult> {
    let shape = same_shape(x, reference)?;
    if shape.channels < 2 {
        return Err(Error::invalid("SAM needs at least two channels"));
    }
    let plane = shape.plane();
    let (xd, rd) = (x.data(), reference.data());
    let mut sum = 0.0;
    let mut scored = 0usize;
    let mut skipped = 0usize;
    for p in 0..plane {
        let (mut nx, mut nr) = (0.0, 0.0);
        for c in 0..shape.channels {
            let (a, b) = (xd[c * plane + p], rd[c * plane + p]);
            nx += a * a;
            nr += b * b;
        }
        if nx == 0.0 || nr == 0.0 {
            skipped += 1;
            continue;
        }
        // 2 atan2(|u - v|, |u + v|) on the unit vectors; acos loses about
        // 1e-8 rad next to zero angle.
        let (sx, sr) = (libm::sqrt(nx), libm::sqrt(nr));
        let (mut diff, mut plus) = (0.0, 0.0);
        for c in 0..shape.channels {
            let (u, v) = (xd[c * plane + p] / sx, rd[c * plane + p] / sr);
            diff += (u - v) * (u - v);
            plus += (u + v) * (u + v);
        }
        sum += 2.0 * libm::atan2(libm::sqrt(diff), libm::sqrt(plus));
        scored += 1;
    }
    let degrees = if scored == 0 { 0.0 } else { (sum / scored as f64).to_degrees() };
    Ok(SamResult { degrees, skipped })
}

/// Same-resolution ERGAS, `100 sqrt(mean_b MSE_b / mean(ref_b)^2)`.
pub fn ergas(x: &Tensor3, reference: &Tensor3) -> Result<f64> {
    let shape = same_shape(x, reference)?;
    let mut acc = 0.0;
    for c in 0..shape.channels {
        let r = reference.plane(c);
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        if mean == 0.0 {
            return Err(Error::invalid("ERGAS undefined for a reference band with zero mean"));
        }
        acc += band_mse(x.plane(c), r) / (mean * mean);
    }
    Ok(100.0 * libm::sqrt(acc / shape.channels as f64))
}

/// All four metrics; SAM and ERGAS only for multi-channel data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub psnr: f64,
    pub ssim: f64,
    pub sam: Option<f64>,
    pub ergas: Option<f64>,
}

pub fn evaluate(x: &Tensor3, reference: &Tensor3) -> Result<MetricReport> {
    let multi = x.shape().channels >= 2;
    Ok(MetricReport {
        psnr: psnr(x, reference)?,
        ssim: ssim(x, reference)?,
        sam: if multi { Some(sam(x, reference)?.degrees) } else { None },
        ergas: if multi { Some(ergas(x, reference)?) } else { None },
    })
}
