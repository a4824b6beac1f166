//! Sparse SAR imaging toolkit.
//!
//! Simulates raw echoes from sparse discretized scenes, under-samples them with
//! uniform or jittered acquisition plans, reconstructs the reflectivity with
//! l_q-regularized iterative shrinkage-thresholding, and measures recovery with
//! MSE curves and Monte-Carlo phase-transition diagrams.
//!
//! Vectors of scene reflectivity are flattened azimuth-major (`m * cols + n`),
//! echo data rows are pulses and columns are full-rate range bins.

// `!(x > 0.0)` is used on purpose so NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod fastops;
pub mod io;
pub mod radar;
pub mod recon;
pub mod rng;
pub mod sampling;
pub mod scene;
pub mod waveform;

pub use error::{Error, Result};

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex64;
