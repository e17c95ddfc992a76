//! Floating point abstraction shared by every module.
//!
//! All computations are generic over [`Scalar`], implemented for `f32` and
//! `f64`. Tolerances that depend on the precision of the type live here so
//! the numeric modules never hard-code an `f64` epsilon.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real number type used throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Allowed deviation of the weight sum from one.
    fn weight_tolerance() -> Self;

    /// Distance (in x-space) below which the greedy encoder treats a value as
    /// sitting exactly on a cylinder boundary.
    fn snap_tolerance() -> Self;

    /// Target residual for one-dimensional root finding.
    fn root_tolerance() -> Self;

    /// Converts an `f64` literal. Panics only if the literal is not finite.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn weight_tolerance() -> Self {
        1e-12
    }

    #[inline]
    fn snap_tolerance() -> Self {
        64.0 * f64::EPSILON
    }

    #[inline]
    fn root_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn weight_tolerance() -> Self {
        16.0 * f32::EPSILON
    }

    #[inline]
    fn snap_tolerance() -> Self {
        64.0 * f32::EPSILON
    }

    #[inline]
    fn root_tolerance() -> Self {
        8.0 * f32::EPSILON
    }
}
