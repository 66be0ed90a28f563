//! Exploratory landscape analysis for neural-architecture search spaces.
//!
//! The crate samples the 23-parameter architecture space with Latin
//! hypercube designs, computes twenty landscape features over evaluated
//! designs, compares them against the 24 noiseless BBOB functions and
//! clusters the resulting feature vectors.

pub mod analysis;
pub mod bbob;
pub mod clustering;
pub mod design_space;
pub mod ela;
pub mod error;
pub mod io;
pub mod linalg;
pub mod pipeline;
pub mod sampling;

pub use error::{Error, FeatureFamily, Result};
