use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    None,
    /// Mean/variance over the spatial positions of each channel, no affine.
    PerChannel,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::PerChannel => "per-channel",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Normalization::None),
            "per-channel" => Some(Normalization::PerChannel),
            _ => None,
        }
    }
}

/// Architecture of the gradient-prediction network.
///
/// The trunk is `blocks` same-padded convolutions, each followed by optional
/// normalization and a leaky ReLU. With `skip` the first hidden activation is added
/// to the last one. Three independent heads (h, v, t) then map the trunk output to
/// `output_channels` channels each.
///
/// Heads start with small weights (`head_gain`) so the first predictions are
/// close to zero rather than unit-scale noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetConfig {
    pub blocks: usize,
    pub width: usize,
    pub kernel: usize,
    pub skip: bool,
    pub leaky_slope: f64,
    pub normalization: Normalization,
    /// Multiplier on the He standard deviation used for the head weights.
    pub head_gain: f64,
    pub input_channels: usize,
    pub output_channels: usize,
}

/// Channel counts of zero mean "match the image" and are filled in by
/// [`NetConfig::resolved`].
impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            blocks: 6,
            width: 16,
            kernel: 3,
            skip: true,
            leaky_slope: 0.2,
            normalization: Normalization::PerChannel,
            head_gain: 0.1,
            input_channels: 0,
            output_channels: 0,
        }
    }
}

impl NetConfig {
    /// Default architecture for an image with `channels` channels.
    pub fn for_channels(channels: usize) -> Self {
        NetConfig::default().resolved(channels)
    }

    /// Replaces unset (zero) channel counts by the image channel count.
    pub fn resolved(mut self, channels: usize) -> Self {
        if self.input_channels == 0 {
            self.input_channels = channels;
        }
        if self.output_channels == 0 {
            self.output_channels = channels;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return Err(Error::invalid("net blocks must be at least 1"));
        }
        if self.width == 0 || self.input_channels == 0 || self.output_channels == 0 {
            return Err(Error::invalid("net widths and channel counts must be positive"));
        }
        if self.kernel == 0 || self.kernel % 2 == 0 {
            return Err(Error::invalid("net kernel must be odd"));
        }
        if !(self.head_gain >= 0.0 && self.head_gain.is_finite()) {
            return Err(Error::invalid("head gain must be nonnegative"));
        }
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return Err(Error::invalid("leaky slope must lie in (0, 1)"));
        }
        Ok(())
    }
}
