//! File formats, configuration, datasets, synthetic data and the command
//! implementations behind the `leukocov` binary.
//!
//! The numerical work lives in [`leukocov_core`]; this crate adds everything
//! that needs `std`.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod imageio;
pub mod model_io;
pub mod spdtext;
pub mod synth;
pub mod workflow;

pub use error::{AppError, Result};
