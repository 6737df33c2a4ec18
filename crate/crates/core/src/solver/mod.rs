//! Inpainting and denoising solvers built on the gradient regularizer.

mod admm;
mod config;
mod denoise;
mod mask;
mod prior;
mod trace;
mod xupdate;

pub use admm::{
    augmented_residual, compute_rhs, objective_terms, objective_value, observed_residual, run_inpainting,
    run_inpainting_with, update_k, update_lambda, update_theta, AdmmState, InpaintOutput, RunOptions,
};
pub use config::{DenoiseConfig, SolverConfig};
pub use denoise::{run_denoising, run_denoising_with, DenoiseOutput};
pub use mask::ObservationMask;
pub use prior::GradientPrior;
pub use trace::{IterationTrace, TraceRecord};
pub use xupdate::{update_x, ScreenedPoisson};

pub use crate::prox::soft_threshold;
