//! DEA benchmarking: closest frontier targets and most-similar peer
//! groups, traded off through an alpha-weighted bi-objective program.
//!
//! The numeric kernels are generic over the scalar type through
//! [`scalar::Scalar`]; the aliases below pin everything to `f64` for
//! ordinary use.

pub mod dataset;
pub mod error;
pub mod frontier;
pub mod lp;
pub mod metrics;
pub mod mip;
pub mod model;
pub mod report;
pub mod scalar;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` aliases for the main domain types.
pub type Dataset = dataset::Dataset<f64>;
pub type DmuRecord = dataset::DmuRecord<f64>;
pub type ScaledData = dataset::ScaledData<f64>;
pub type FrontierClassification = frontier::FrontierClassification<f64>;
pub type DistanceMatrix = metrics::DistanceMatrix<f64>;
pub type BenchmarkSolution = model::BenchmarkSolution<f64>;
pub type SolveOptions = model::SolveOptions<f64>;
pub type Hyperplane = model::Hyperplane<f64>;
pub type AlphaSeries = sweep::AlphaSeries<f64>;
pub type AlphaSegment = sweep::AlphaSegment<f64>;
pub type LinearProgram = lp::LinearProgram<f64>;
pub type MixedProgram = mip::MixedProgram<f64>;
