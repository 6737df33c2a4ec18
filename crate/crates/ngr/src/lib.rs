//! File formats, configuration and the command-line front end for `ngr-core`.

pub mod bench;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod selfcheck;

pub use error::{CliError, Result};
