//! The untrained gradient-prediction network: a shared convolutional trunk with
//! one head per axis, hand-written backpropagation, and Adam.

mod adam;
mod config;
mod conv;
mod model;
mod params;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use config::{NetConfig, Normalization};
pub use model::{backward, forward, forward_tape, loss_and_grad, penalty, AxisWeights, GradientTriple, Tape};
pub use params::{layout, ConvSlot, NetParams};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::{Shape, Tensor3};

/// Fixed network input: i.i.d. uniform samples in `[0, amplitude)`.
pub fn init_input(rng: &mut Rng, shape: Shape, amplitude: f64) -> Result<Tensor3> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::invalid("input amplitude must be positive"));
    }
    rng.uniform(shape, 0.0, amplitude)
}

/// Same as [`NetParams::init`].
pub fn init_params(rng: &mut Rng, cfg: &NetConfig) -> Result<NetParams> {
    NetParams::init(rng, cfg)
}
