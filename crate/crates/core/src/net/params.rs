use alloc::vec;
use alloc::vec::Vec;

use super::config::NetConfig;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::Axis;

/// Where one convolution's weights and bias live in the flat parameter buffer.
///
/// Weights are laid out `[out][in][ky][kx]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvSlot {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: usize,
    pub weight_offset: usize,
    pub bias_offset: usize,
}

impl ConvSlot {
    pub fn fan_in(&self) -> usize {
        self.in_channels * self.kernel * self.kernel
    }

    pub fn weight_len(&self) -> usize {
        self.out_channels * self.fan_in()
    }

    pub fn weight_range(&self) -> core::ops::Range<usize> {
        self.weight_offset..self.weight_offset + self.weight_len()
    }

    pub fn bias_range(&self) -> core::ops::Range<usize> {
        self.bias_offset..self.bias_offset + self.out_channels
    }
}

/// Slot table for a config: trunk convolutions first, then the h, v and t heads.
pub fn layout(cfg: &NetConfig) -> Vec<ConvSlot> {
    let mut slots = Vec::with_capacity(cfg.blocks + 3);
    let mut offset = 0;
    let mut push = |in_channels, out_channels| {
        let slot = ConvSlot {
            in_channels,
            out_channels,
            kernel: cfg.kernel,
            weight_offset: offset,
            bias_offset: offset + in_channels * out_channels * cfg.kernel * cfg.kernel,
        };
        offset = slot.bias_offset + out_channels;
        slot
    };
    for b in 0..cfg.blocks {
        let cin = if b == 0 { cfg.input_channels } else { cfg.width };
        slots.push(push(cin, cfg.width));
    }
    for _ in Axis::ALL {
        slots.push(push(cfg.width, cfg.output_channels));
    }
    slots
}

/// All learnable parameters in one flat buffer, ordered as [`layout`] describes.
///
/// Gradients and Adam moments reuse the same type, so "shaped like the params"
/// means "same config".
#[derive(Debug, Clone, PartialEq)]
pub struct NetParams {
    cfg: NetConfig,
    slots: Vec<ConvSlot>,
    data: Vec<f64>,
}

impl NetParams {
    pub fn zeros(cfg: &NetConfig) -> Result<Self> {
        cfg.validate()?;
        let slots = layout(cfg);
        let len = slots.last().map_or(0, |s| s.bias_range().end);
        Ok(NetParams { cfg: *cfg, slots, data: vec![0.0; len] })
    }

    /// He-style initialization: weights ~ N(0, 2 / fan_in), biases zero. Head
    /// weights are further scaled by `head_gain`.
    pub fn init(rng: &mut Rng, cfg: &NetConfig) -> Result<Self> {
        let mut p = Self::zeros(cfg)?;
        for (i, slot) in p.slots.clone().into_iter().enumerate() {
            let gain = if i < cfg.blocks { 1.0 } else { cfg.head_gain };
            let sd = gain * libm::sqrt(2.0 / slot.fan_in() as f64);
            for w in &mut p.data[slot.weight_range()] {
                *w = sd * rng.normal();
            }
        }
        Ok(p)
    }

    /// Rebuilds params from a flat buffer, e.g. one read back from disk.
    pub fn from_flat(cfg: &NetConfig, data: Vec<f64>) -> Result<Self> {
        let mut p = Self::zeros(cfg)?;
        if data.len() != p.data.len() {
            return Err(Error::invalid("parameter count does not match config"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("parameters must be finite"));
        }
        p.data = data;
        Ok(p)
    }

    pub fn zeros_like(&self) -> Self {
        NetParams { cfg: self.cfg, slots: self.slots.clone(), data: vec![0.0; self.data.len()] }
    }

    pub fn config(&self) -> &NetConfig {
        &self.cfg
    }

    pub fn slots(&self) -> &[ConvSlot] {
        &self.slots
    }

    pub fn trunk_slots(&self) -> &[ConvSlot] {
        &self.slots[..self.cfg.blocks]
    }

    pub fn head_slot(&self, axis: Axis) -> ConvSlot {
        let i = match axis {
            Axis::H => 0,
            Axis::V => 1,
            Axis::T => 2,
        };
        self.slots[self.cfg.blocks + i]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn weights(&self, slot: &ConvSlot) -> &[f64] {
        &self.data[slot.weight_range()]
    }

    pub fn bias(&self, slot: &ConvSlot) -> &[f64] {
        &self.data[slot.bias_range()]
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_compatible(&self, other: &NetParams) -> Result<()> {
        if self.cfg != other.cfg {
            return Err(Error::invalid("parameter sets come from different configs"));
        }
        Ok(())
    }
}
