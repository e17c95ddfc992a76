//! Moran-type dimension equations and the covering bounds for the graph.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SalemError};
use crate::numsys::SalemSystem;
use crate::salemfun::ModifiedSalem;
use crate::scalar::Scalar;

/// Iteration cap for the bisection in [`moran_dimension`].
pub const MORAN_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoranResult<T> {
    pub digit_set: Vec<usize>,
    pub alpha: T,
    /// `Σ_{r ∈ digit_set} p_r^alpha - 1`
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionBounds<T> {
    pub a: T,
    pub b: T,
    pub alpha1: T,
    pub alpha2: T,
    pub lo: T,
    pub hi: T,
}

/// Solves `Σ_{r ∈ digit_set} p_r^α = 1` for `α ∈ [0, 1]`: the Hausdorff
/// dimension of the set of points whose digits all lie in `digit_set`.
///
/// `α ↦ Σ p_r^α` is strictly decreasing, above 1 at `α = 0` for two or more
/// digits and at most 1 at `α = 1`, so bisection always brackets the root.
pub fn moran_dimension<T: Scalar>(
    system: &SalemSystem<T>,
    digit_set: &[usize],
) -> Result<MoranResult<T>> {
    let mut set = digit_set.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(SalemError::EmptyDigitSet);
    }
    set.iter().try_for_each(|&d| system.check_digit(d))?;

    let excess =
        |alpha: T| -> T { set.iter().map(|&r| system.weight(r).powf(alpha)).sum::<T>() - T::one() };
    if set.len() == 1 {
        return Ok(MoranResult {
            digit_set: set,
            alpha: T::zero(),
            residual: T::zero(),
        });
    }

    let tol = T::root_tolerance();
    let at_one = excess(T::one());
    if at_one.abs() <= tol {
        return Ok(MoranResult {
            digit_set: set,
            alpha: T::one(),
            residual: at_one,
        });
    }

    let two = T::one() + T::one();
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut alpha = (lo + hi) / two;
    let mut residual = excess(alpha);
    for _ in 0..MORAN_MAX_ITER {
        if residual.abs() <= tol {
            break;
        }
        if residual > T::zero() {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let next = (lo + hi) / two;
        if next == alpha {
            break;
        }
        alpha = next;
        residual = excess(alpha);
    }
    Ok(MoranResult {
        digit_set: set,
        alpha,
        residual,
    })
}

/// `α_1 = ln q / ln(1/a)` and `α_2 = ln q / ln(1/b)` where `a` and `b` are the
/// smallest and largest of the weights `p_t, p_{θ(t)}`.
///
/// Both raw values are reported; `lo`/`hi` order them. For non-uniform
/// weights `α_1 < α_2`.
pub fn graph_dimension_bounds<T: Scalar>(f: &ModifiedSalem<T>) -> DimensionBounds<T> {
    let s = f.system();
    let (a, b) = (0..s.q())
        .flat_map(|t| [s.weight(t), f.image_weight(t)])
        .fold((T::one(), T::zero()), |(lo, hi), w| (lo.min(w), hi.max(w)));
    let ln_q = T::from_usize_lossy(s.q()).ln();
    let alpha1 = ln_q / a.recip().ln();
    let alpha2 = ln_q / b.recip().ln();
    DimensionBounds {
        a,
        b,
        alpha1,
        alpha2,
        lo: alpha1.min(alpha2),
        hi: alpha1.max(alpha2),
    }
}
