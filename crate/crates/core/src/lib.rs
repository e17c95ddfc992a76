//! Permutation-modified Salem functions.
//!
//! Every point of `[0, 1]` has an expansion `x = Δ_{i_1 i_2 …}` in the digit
//! system induced by weights `p_0, …, p_{q-1}`. A digit permutation `θ`
//! defines `f(x) = Δ_{θ(i_1) θ(i_2) …}`; the identity gives `f(x) = x` and
//! the classical Salem function is recovered by feeding it ordinary base-`q`
//! digits.
//!
//! The crate is organised as
//!
//! - [`numsys`]: weights, digit strings, the greedy codec, shifts, cylinders;
//! - [`salemfun`]: evaluation of `f`, the classical Salem function,
//!   functional-equation residuals and one-sided limits;
//! - [`analysis`]: increments, derivative ratios, digit frequencies, the
//!   integral, Moran dimensions, graph-dimension bounds and structural checks;
//! - [`ifs`]: the affine maps whose attractor is the graph of `f`, point
//!   clouds, cover areas and box counting;
//! - [`cli`]: the `salem` command line front end.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below fix the common double-precision case.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod ifs;
pub mod numsys;
pub mod salemfun;
pub mod scalar;

pub use error::{Result, SalemError};
pub use numsys::{Cylinder, CylinderBounds, DigitPermutation, DigitString, SalemSystem};
pub use salemfun::{JumpReport, ModifiedSalem};
pub use scalar::Scalar;

pub type SalemSystemF64 = SalemSystem<f64>;
pub type SalemSystemF32 = SalemSystem<f32>;
pub type ModifiedSalemF64 = ModifiedSalem<f64>;
pub type ModifiedSalemF32 = ModifiedSalem<f32>;
pub type JumpReportF64 = JumpReport<f64>;
pub type GraphCloudF64 = ifs::GraphCloud<f64>;
pub type IntegralResultF64 = analysis::IntegralResult<f64>;
pub type MoranResultF64 = analysis::MoranResult<f64>;
pub type DimensionBoundsF64 = analysis::DimensionBounds<f64>;
