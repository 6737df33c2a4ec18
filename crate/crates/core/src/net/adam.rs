use super::params::NetParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 0.01, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// Moment accumulators and step counter for Adam with bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: NetParams,
    pub v: NetParams,
    pub t: u64,
}

impl AdamState {
    pub fn new(params: &NetParams, config: AdamConfig) -> Self {
        AdamState { config, m: params.zeros_like(), v: params.zeros_like(), t: 0 }
    }
}

/// One Adam update of `params` in place.
pub fn adam_step(params: &mut NetParams, grads: &NetParams, state: &mut AdamState) -> Result<()> {
    params.check_compatible(grads)?;
    params.check_compatible(&state.m)?;
    if !grads.is_finite() {
        return Err(Error::NonFinite { stage: "adam gradient", iteration: state.t as usize });
    }
    let AdamConfig { lr, beta1, beta2, eps } = state.config;
    state.t += 1;
    let bc1 = 1.0 - libm::pow(beta1, state.t as f64);
    let bc2 = 1.0 - libm::pow(beta2, state.t as f64);
    let theta = params.as_mut_slice();
    let m = state.m.as_mut_slice();
    let v = state.v.as_mut_slice();
    for i in 0..theta.len() {
        let g = grads.as_slice()[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        theta[i] -= lr * m_hat / (libm::sqrt(v_hat) + eps);
    }
    Ok(())
}
