//! Scalar abstraction for the numeric kernels.
//!
//! Everything numerical (simplex, branch-and-bound, distances, model
//! assembly) is generic over [`Scalar`] so the engine can be instantiated
//! with `f32`, `f64` or any other `num_traits::Float` type. The crate root
//! exposes `f64` aliases, which is what the CLI uses.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Copy + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Copy + Send + Sync + 'static
{
}

/// Lift an `f64` constant into the scalar type.
#[inline]
pub fn c<S: Scalar>(v: f64) -> S {
    S::from_f64(v).expect("constant must be representable in the scalar type")
}

/// Primal feasibility tolerance for the LP engine.
pub const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost optimality tolerance for the LP engine.
pub const OPT_TOL: f64 = 1e-7;
/// Tolerance used by solution checks (integrality, complementarity,
/// residuals, classification thresholds).
pub const CHECK_TOL: f64 = 1e-6;
/// Pivot magnitude below which a tableau entry is treated as zero.
pub const PIVOT_TOL: f64 = 1e-9;
