//! Scalar abstraction for the analysis routines.
//!
//! All density-evolution math is written against [`Real`] so it runs on
//! `f32` or `f64`. The crate-root aliases fix `f64` as the default scalar;
//! the published threshold tables need its precision.

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used by density evolution and rate formulas.
pub trait Real: Float + FromPrimitive + Sum + Debug + Send + Sync + 'static {
    /// Lossless-enough conversion for tolerances and degree fractions.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Sum + Debug + Send + Sync + 'static {}
