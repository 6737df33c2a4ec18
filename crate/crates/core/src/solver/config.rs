use crate::error::{Error, Result};
use crate::net::{AdamConfig, AxisWeights, NetConfig};

/// Settings for the inpainting solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Per-axis penalty weights `(lambda_h, lambda_v, lambda_t)`.
    pub lambda: AxisWeights,
    /// ADMM penalty parameter.
    pub mu: f64,
    pub outer_iters: usize,
    pub adam_steps_per_iter: usize,
    /// Adam learning rate; zero freezes the network.
    pub lr: f64,
    pub seed: u64,
    pub net: NetConfig,
    /// Upper end of the uniform distribution the fixed network input is drawn from.
    pub input_amplitude: f64,
    /// Stop once `|X_new - X_old| / |X_old|` drops below this; zero runs the full budget.
    pub tol: f64,
    /// Keep the predicted gradient maps every this many iterations; zero disables.
    pub snapshot_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: AxisWeights::ONES,
            mu: 16.0,
            outer_iters: 400,
            adam_steps_per_iter: 1,
            lr: 0.01,
            seed: 0,
            net: NetConfig::default(),
            input_amplitude: 0.1,
            tol: 0.0,
            snapshot_every: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.lambda.validate()?;
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::invalid("mu must be positive"));
        }
        if self.outer_iters == 0 {
            return Err(Error::invalid("outer_iters must be at least 1"));
        }
        if self.adam_steps_per_iter == 0 {
            return Err(Error::invalid("adam_steps_per_iter must be at least 1"));
        }
        if !(self.lr >= 0.0) || !self.lr.is_finite() {
            return Err(Error::invalid("lr must be finite and nonnegative"));
        }
        if !(self.input_amplitude > 0.0) || !self.input_amplitude.is_finite() {
            return Err(Error::invalid("input_amplitude must be positive"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid("tol must be nonnegative"));
        }
        let probe = self.net.resolved(1);
        probe.validate()
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig { lr: self.lr, ..AdamConfig::default() }
    }
}

/// Settings for the denoiser: `beta/2 |Y - X - S|^2 + tau |S|_1` plus the
/// gradient penalty, solved by block coordinate descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiseConfig {
    pub solver: SolverConfig,
    /// Fidelity weight; takes the role of `mu` in the image update.
    pub beta: f64,
    /// Weight of the sparse outlier term; zero disables it.
    pub tau: f64,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        DenoiseConfig {
            solver: SolverConfig { outer_iters: 200, ..SolverConfig::default() },
            beta: 1.0,
            tau: 0.05,
        }
    }
}

impl DenoiseConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::invalid("beta must be positive"));
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(Error::invalid("tau must be finite and nonnegative"));
        }
        Ok(())
    }
}
