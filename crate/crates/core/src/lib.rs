//! Finite-scale machinery for slow-entropy and d̄ experiments on binary
//! symbolic processes.
//!
//! * [`words`]: packed binary words, the d̄ metric, partition distance.
//! * [`models`]: seeded generators (Bernoulli, Sturmian, substitution,
//!   periodic, product) and block counts `a_n`.
//! * [`covering`]: Hamming balls, covering and packing numbers.
//! * [`transport`]: exact d̄ between name distributions and the finite
//!   relative very-weak-Bernoulli tester.
//! * [`stacking`]: Rokhlin towers, dyadic cocycles and independent
//!   cutting and stacking.
//!
//! Real-valued quantities are generic over [`Scalar`]; the aliases at the
//! crate root fix the common `f32` instantiations.

// `!(x > 0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covering;
pub mod error;
pub mod io;
pub mod models;
pub mod rng;
pub mod scalar;
pub mod stacking;
pub mod transport;
pub mod words;

pub use error::{Error, Result};
pub use models::{block_complexity, sample_orbit, Orbit, ProcessGenerator};
pub use scalar::Scalar;
pub use stacking::{build_tower, independent_stack_names, DyadicCocycle, RokhlinTower, StackedNames};
pub use transport::{dbar_dist, vwb_test, NameDistribution, Verdict};
pub use words::{binary_entropy, dbar_words, extract_name, partition_distance, BinaryWord, LabeledPartition};

// Single-precision instantiations.
pub type WeightedSampleF32 = covering::WeightedSample<f32>;
pub type CoverParamsF32 = covering::CoverParams<f32>;
pub type CoverResultF32 = covering::CoverResult<f32>;
pub type NameDistributionF32 = transport::NameDistribution<f32>;
pub type VwbParamsF32 = transport::VwbParams<f32>;
pub type VwbReportF32 = transport::VwbReport<f32>;
pub type LabeledPartitionF32 = words::LabeledPartition<f32>;
pub type BallBoundReportF32 = stacking::BallBoundReport<f32>;
