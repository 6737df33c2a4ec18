use crate::error::{Error, Result};
use crate::net::{
    adam_step, backward, forward_tape, init_input, AdamState, AxisWeights, GradientTriple, NetConfig,
    NetParams, Tape,
};
use crate::rng::Rng;
use crate::tensor::{Shape, Tensor3};

use super::config::SolverConfig;

/// The network half of the regularizer: parameters, optimizer state, the fixed
/// input and the most recent prediction.
///
/// The prediction is always the output at the current parameters; the forward
/// pass that produced it is kept and reused by the next training step.
#[derive(Debug, Clone)]
pub struct GradientPrior {
    cfg: NetConfig,
    params: NetParams,
    adam: AdamState,
    input: Tensor3,
    tape: Tape,
}

impl GradientPrior {
    /// Draws the input first, then (unless given) the parameters, from one seeded stream.
    pub fn new(image: Shape, cfg: &SolverConfig, initial: Option<NetParams>) -> Result<Self> {
        let net = cfg.net.resolved(image.channels);
        net.validate()?;
        if net.output_channels != image.channels {
            return Err(Error::invalid("network output channels must equal image channels"));
        }
        let mut rng = Rng::new(cfg.seed);
        let input = init_input(&mut rng, image.with_channels(net.input_channels), cfg.input_amplitude)?;
        let params = match initial {
            Some(p) => {
                if p.config() != &net {
                    return Err(Error::invalid("initial parameters do not match the network config"));
                }
                p
            }
            None => NetParams::init(&mut rng, &net)?,
        };
        let tape = forward_tape(&params, &net, &input)?;
        let adam = AdamState::new(&params, cfg.adam());
        Ok(GradientPrior { cfg: net, params, adam, input, tape })
    }

    pub fn config(&self) -> &NetConfig {
        &self.cfg
    }

    pub fn params(&self) -> &NetParams {
        &self.params
    }

    pub fn into_params(self) -> NetParams {
        self.params
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn input(&self) -> &Tensor3 {
        &self.input
    }

    pub fn prediction(&self) -> &GradientTriple {
        self.tape.output()
    }

    /// Runs `steps` Adam updates on `sum_i lambda_i/2 |target_i - f_i|^2` and
    /// returns the loss seen before the first one.
    pub fn train(&mut self, target: &GradientTriple, lambda: &AxisWeights, steps: usize) -> Result<f64> {
        let mut first = None;
        for _ in 0..steps {
            let (loss, grads) = backward(&self.params, &self.cfg, &self.tape, target, lambda)?;
            first.get_or_insert(loss);
            if self.adam.config.lr == 0.0 {
                continue;
            }
            adam_step(&mut self.params, &grads, &mut self.adam)?;
            self.tape = forward_tape(&self.params, &self.cfg, &self.input)?;
        }
        Ok(first.unwrap_or(0.0))
    }
}
