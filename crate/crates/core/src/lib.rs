//! Quantitative group testing: random pooling designs, greedy and exhaustive
//! decoders, the closed-form thresholds, and a seeded Monte Carlo harness.

pub mod decoders;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod model;
pub mod pooling;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use model::{derive_params, encode, is_consistent, overlap, Configuration, ProblemParams, TestResults};
pub use pooling::{check_event_r, generate, PoolingGraph, RDiagnostics};
