//! Zero-shot image restoration with a neural gradient regularizer.
//!
//! The restored image `X` is tied to an untrained convolutional network through a
//! penalty `sum_i lambda_i/2 * |grad_i X - f_i(G0)|^2`, where `f` predicts the three
//! axis gradient maps from a fixed random input `G0`. Inpainting is solved by ADMM:
//! the network parameters take Adam steps, the image update is a closed-form FFT
//! solve under periodic boundaries, and the multipliers follow the usual ascent.
//!
//! The crate is `no_std` (it needs `alloc`). Byte-level encodings live in
//! [`format`]; the CLI and anything touching the filesystem are in the
//! companion `ngr` crate.
//!
//! Tensor layout is fixed everywhere: a [`Tensor3`] of shape `H x W x C` stores
//! channel-major planes, each plane row-major, so element `(y, x, c)` sits at
//! `c * H * W + y * W + x`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;

pub mod baselines;
pub mod degrade;
pub mod fft;
pub mod format;
pub mod metrics;
pub mod net;
pub mod prox;
pub mod rng;
pub mod solver;
pub mod synthetic;
pub mod tensor;

pub use error::{Error, Result};
pub use fft::ComplexTensor3;
pub use rng::Rng;
pub use tensor::{Axis, Shape, Tensor3};
