//! Simulation and reconstruction for one-dimensional latent-space random
//! graphs: generate graphs from points on a segment with distance-decaying
//! edge probabilities, recover the vertex order and positions from the
//! unlabeled graph, and probe the sample-complexity limits of distinguishing
//! position vectors.
//!
//! Module map:
//! - [`model`]: parameters, position sampling, graph sampling, likelihood,
//!   and the closed-form degree / common-neighbor densities.
//! - [`stats`]: common-neighbor counting over the observed graph.
//! - [`math`]: the scalar kernels the estimators invert.
//! - [`estimate`]: (L, U, delta)-approximate pairwise distance oracles.
//! - [`order`]: order recovery from a distance oracle.
//! - [`eval`]: position recovery and accuracy reports.
//! - [`distinguish`]: likelihood-ratio distinguishing experiments.
//! - [`files`] and [`cli`]: the text formats and the command-line pipelines.
//!
//! All randomness is counter-based ([`rng`]): outputs are bit-identical for
//! a given seed regardless of evaluation order or thread count.

pub mod cli;
pub mod distinguish;
pub mod error;
pub mod estimate;
pub mod eval;
pub mod files;
pub mod math;
pub mod model;
pub mod order;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
