//! Simulation of a reservoir computer built from a driven-dissipative
//! Kerr-nonlinear lattice.
//!
//! The pipeline mirrors the physical experiment end to end: handwritten
//! digits are downsampled, projected onto an N x N node array by a seeded
//! sparse random matrix, and encoded in the pump powers of a coherently
//! driven lattice with pi-phase-alternating neighbors. The lattice is
//! integrated to its steady state, the transmitted intensity pattern is
//! sampled by a camera model, and a multinomial logistic-regression output
//! layer is trained on the sampled images.
//!
//! Modules follow the pipeline: [`mnist`] (ingestion), [`encoder`] (random
//! projection and pump synthesis), [`lattice`] (dynamics, steady states,
//! response curves, camera, connectivity), [`readout`] (trained output
//! layer) and [`harness`] (config-driven experiments with CSV reports).

pub mod encoder;
pub mod error;
pub mod exec;
pub mod harness;
pub mod lattice;
pub mod mnist;
pub mod readout;

pub use error::{Error, Result};

/// Directory holding the MNIST IDX files for data-dependent tests:
/// `$MNIST_DIR` if set, else `<repo root>/data/mnist`.
#[doc(hidden)]
pub fn test_data_dir() -> std::path::PathBuf {
    if let Ok(dir) = std::env::var("MNIST_DIR") {
        return std::path::PathBuf::from(dir);
    }
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/mnist")
        .components()
        .collect()
}
