//! Simulation and verification of zero-mean stationary cyclical time series.

// `!(x > 0.0)` guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitude;
pub mod cycles;
pub mod error;
pub mod innovations;
pub mod lab;
pub mod linear;
pub mod modulated;
pub mod process;
pub mod quad;
pub mod rng;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
