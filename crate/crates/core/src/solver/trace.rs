use alloc::vec::Vec;

use crate::net::GradientTriple;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// 1-based iteration number.
    pub iter: usize,
    pub objective: f64,
    /// Max-abs fidelity residual: on-mask for inpainting, `Y - X - S` for denoising.
    pub residual: f64,
    /// Milliseconds since the solve started, when a clock was supplied.
    pub elapsed_ms: Option<f64>,
}

/// Per-iteration diagnostics and optional gradient-map snapshots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<TraceRecord>,
    pub snapshots: Vec<(usize, GradientTriple)>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `|G(k+1) - G(k)| / |G(k)|` between consecutive snapshots.
    pub fn snapshot_changes(&self) -> Vec<f64> {
        self.snapshots
            .windows(2)
            .map(|w| {
                let (a, b) = (&w[0].1, &w[1].1);
                let mut diff = 0.0;
                for axis in crate::tensor::Axis::ALL {
                    diff += b[axis].zip_map(&a[axis], |p, q| p - q).norm_sq();
                }
                libm::sqrt(diff / a.norm_sq().max(f64::MIN_POSITIVE))
            })
            .collect()
    }
}
