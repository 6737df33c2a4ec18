//! Synthetic degradations: sampling masks, deadlines, Gaussian, impulse and
//! stripe noise, and the mixed-noise presets.
//!
//! Every function is pure: the input is left untouched and the output depends
//! only on the input, the arguments and the state of `rng`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::solver::ObservationMask;
use crate::tensor::{Shape, Tensor3};

/// Stripe offsets are drawn from this range unless told otherwise.
pub const DEFAULT_STRIPE_RANGE: (f64, f64) = (-0.25, 0.25);

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidArgument(alloc::format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidArgument(alloc::format!("{name} must be an ordered finite range")));
    }
    Ok(())
}

/// Uniform draw that tolerates a degenerate range.
fn draw(rng: &mut Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.range(lo, hi)
    }
}

fn round_count(fraction: f64, n: usize) -> usize {
    libm::round(fraction * n as f64) as usize
}

/// Each entry observed independently with probability `sr`.
pub fn random_mask(rng: &mut Rng, shape: Shape, sr: f64) -> Result<ObservationMask> {
    shape.validate()?;
    if !(sr > 0.0 && sr <= 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("sampling rate must lie in (0, 1], got {sr}")));
    }
    let observed = (0..shape.len()).map(|_| rng.next_f64() < sr).collect();
    ObservationMask::new(shape, observed)
}

/// `columns` distinct columns missing across all channels.
pub fn deadline_mask(rng: &mut Rng, shape: Shape, columns: usize) -> Result<ObservationMask> {
    shape.validate()?;
    if columns > shape.width {
        return Err(Error::invalid("more deadline columns than image columns"));
    }
    let mut mask = ObservationMask::all(shape);
    for col in rng.choose_distinct(shape.width, columns) {
        for c in 0..shape.channels {
            for y in 0..shape.height {
                mask.set(shape.index(y, col, c), false);
            }
        }
    }
    Ok(mask)
}

/// Adds i.i.d. `N(0, sigma^2)` noise. No clamping.
pub fn add_gaussian(rng: &mut Rng, x: &Tensor3, sigma: f64) -> Result<Tensor3> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma must be nonnegative"));
    }
    let mut out = x.clone();
    for v in out.data_mut() {
        *v += sigma * rng.normal();
    }
    Ok(out)
}

/// Salt-and-pepper: `round(ratio * N)` distinct entries set to 0 or 1 with equal probability.
pub fn add_impulse(rng: &mut Rng, x: &Tensor3, ratio: f64) -> Result<Tensor3> {
    check_fraction("impulse ratio", ratio)?;
    let mut out = x.clone();
    let n = out.data().len();
    for i in rng.choose_distinct(n, round_count(ratio, n)) {
        out[i] = if rng.bernoulli(0.5) { 1.0 } else { 0.0 };
    }
    Ok(out)
}

fn pick_bands(rng: &mut Rng, channels: usize, fraction: f64) -> Vec<usize> {
    let mut bands = rng.choose_distinct(channels, round_count(fraction, channels));
    bands.sort_unstable();
    bands
}

fn pick_columns(rng: &mut Rng, shape: Shape, count: usize, what: &str) -> Result<Vec<usize>> {
    if count > shape.width {
        return Err(Error::InvalidArgument(alloc::format!("more {what} per band than image columns")));
    }
    Ok(rng.choose_distinct(shape.width, count))
}

fn stripe_band(rng: &mut Rng, out: &mut Tensor3, band: usize, count: usize, range: (f64, f64)) -> Result<()> {
    let shape = out.shape();
    for col in pick_columns(rng, shape, count, "stripes")? {
        let offset = draw(rng, range);
        for y in 0..shape.height {
            out[shape.index(y, col, band)] += offset;
        }
    }
    Ok(())
}

fn deadline_band(rng: &mut Rng, out: &mut Tensor3, band: usize, count: usize) -> Result<()> {
    let shape = out.shape();
    for col in pick_columns(rng, shape, count, "deadlines")? {
        for y in 0..shape.height {
            out[shape.index(y, col, band)] = 0.0;
        }
    }
    Ok(())
}

/// In `round(bands_fraction * C)` random bands, `stripes_per_band` random columns
/// each receive a constant offset drawn from `magnitude_range`.
pub fn add_stripes(
    rng: &mut Rng,
    x: &Tensor3,
    bands_fraction: f64,
    stripes_per_band: usize,
    magnitude_range: (f64, f64),
) -> Result<Tensor3> {
    check_fraction("band fraction", bands_fraction)?;
    check_range("stripe magnitude range", magnitude_range)?;
    let mut out = x.clone();
    for band in pick_bands(rng, x.shape().channels, bands_fraction) {
        stripe_band(rng, &mut out, band, stripes_per_band, magnitude_range)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNoisePreset {
    pub gaussian_sigma_range: (f64, f64),
    pub impulse_ratio: f64,
    pub affected_band_fraction: f64,
    pub stripes_per_band: usize,
    pub deadlines_per_band: usize,
    pub stripe_range: (f64, f64),
}

impl MixedNoisePreset {
    pub const WEAK: MixedNoisePreset = MixedNoisePreset {
        gaussian_sigma_range: (0.1, 0.4),
        impulse_ratio: 0.1,
        affected_band_fraction: 0.2,
        stripes_per_band: 35,
        deadlines_per_band: 35,
        stripe_range: DEFAULT_STRIPE_RANGE,
    };

    pub const STRONG: MixedNoisePreset = MixedNoisePreset {
        impulse_ratio: 0.25,
        affected_band_fraction: 0.5,
        ..MixedNoisePreset::WEAK
    };

    /// Everything off; `apply_mixed` with this preset is the identity.
    pub const NONE: MixedNoisePreset = MixedNoisePreset {
        gaussian_sigma_range: (0.0, 0.0),
        impulse_ratio: 0.0,
        affected_band_fraction: 0.0,
        stripes_per_band: 0,
        deadlines_per_band: 0,
        stripe_range: (0.0, 0.0),
    };

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "weak" => Some(Self::WEAK),
            "strong" => Some(Self::STRONG),
            "none" => Some(Self::NONE),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("sigma range", self.gaussian_sigma_range)?;
        if self.gaussian_sigma_range.0 < 0.0 {
            return Err(Error::invalid("sigma range must be nonnegative"));
        }
        check_fraction("impulse ratio", self.impulse_ratio)?;
        check_fraction("band fraction", self.affected_band_fraction)?;
        check_range("stripe magnitude range", self.stripe_range)
    }
}

/// Order: per-band Gaussian (sigma drawn per band), impulse over the whole
/// tensor, then on the selected bands stripes followed by deadlines (zeroed columns).
pub fn apply_mixed(rng: &mut Rng, x: &Tensor3, preset: &MixedNoisePreset) -> Result<Tensor3> {
    preset.validate()?;
    let shape = x.shape();
    let mut out = x.clone();
    for c in 0..shape.channels {
        let sigma = draw(rng, preset.gaussian_sigma_range);
        for v in out.plane_mut(c) {
            *v += sigma * rng.normal();
        }
    }
    out = add_impulse(rng, &out, preset.impulse_ratio)?;
    for band in pick_bands(rng, shape.channels, preset.affected_band_fraction) {
        stripe_band(rng, &mut out, band, preset.stripes_per_band, preset.stripe_range)?;
        deadline_band(rng, &mut out, band, preset.deadlines_per_band)?;
    }
    Ok(out)
}

/// Number of bands `apply_mixed` corrupts with stripes and deadlines.
pub fn mixed_band_count(channels: usize, preset: &MixedNoisePreset) -> usize {
    round_count(preset.affected_band_fraction, channels)
}

/// Concatenates volumes along the channel axis, in order.
pub fn stack_temporal(volumes: &[Tensor3]) -> Result<Tensor3> {
    let first = volumes.first().ok_or_else(|| Error::invalid("no volumes to stack"))?.shape();
    let mut data = Vec::new();
    let mut channels = 0;
    for v in volumes {
        let s = v.shape();
        if s.height != first.height || s.width != first.width {
            return Err(Error::ShapeMismatch { expected: first.with_channels(s.channels), found: s });
        }
        data.extend_from_slice(v.data());
        channels += s.channels;
    }
    Tensor3::from_vec(first.with_channels(channels), data)
}
