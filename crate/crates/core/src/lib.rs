pub mod chain;
pub mod config;
pub mod diagnostics;
pub mod dist;
pub mod error;
pub mod experiment;
pub mod finite;
pub mod kernels;
pub mod linalg;
pub mod models;
pub mod sampler;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
