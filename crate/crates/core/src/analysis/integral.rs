//! Lebesgue integral of `f` over `[0, 1]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SalemError};
use crate::salemfun::ModifiedSalem;
use crate::scalar::Scalar;

/// Largest number of cylinders [`integral_riemann`] will enumerate.
pub const MAX_RIEMANN_CELLS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult<T> {
    pub value: T,
    /// `Σ_t β_{θ(t)} p_t`
    pub numerator: T,
    /// `1 - Σ_t p_{θ(t)} p_t`
    pub denominator: T,
}

/// Closed form `Σ β_{θ(t)} p_t / (1 - Σ p_{θ(t)} p_t)`, obtained by splitting
/// `[0, 1]` into rank-1 cylinders and using the self-affinity of `f` on each.
pub fn integral_closed_form<T: Scalar>(f: &ModifiedSalem<T>) -> IntegralResult<T> {
    let s = f.system();
    let (numerator, overlap) = (0..s.q()).fold((T::zero(), T::zero()), |(num, ov), t| {
        (
            num + f.image_offset(t) * s.weight(t),
            ov + f.image_weight(t) * s.weight(t),
        )
    });
    let denominator = T::one() - overlap;
    IntegralResult {
        value: numerator / denominator,
        numerator,
        denominator,
    }
}

/// Left Riemann sum over all rank-`rank` cylinders: `Σ f(inf Λ) |Λ|`, with
/// `f(inf Λ)` in closed form.
///
/// The subtrees under each leading digit are summed in parallel, each in
/// lexicographic order, and combined in digit order.
pub fn integral_riemann<T: Scalar>(f: &ModifiedSalem<T>, rank: usize) -> Result<T> {
    let q = f.system().q();
    if rank == 0 {
        return Err(SalemError::ZeroRank);
    }
    let too_large = SalemError::RankTooLarge {
        rank,
        q,
        limit: MAX_RIEMANN_CELLS,
    };
    let cells = u32::try_from(rank)
        .ok()
        .and_then(|r| q.checked_pow(r))
        .ok_or(too_large.clone())?;
    if cells > MAX_RIEMANN_CELLS {
        return Err(too_large);
    }
    let tail = f.system().constant_tail(f.theta().apply(0));
    let partials: Vec<T> = (0..q)
        .into_par_iter()
        .map(|t| {
            let node = Node {
                length: f.system().weight(t),
                head: f.image_offset(t),
                scale: f.image_weight(t),
            };
            subtree_sum(f, node, rank - 1, tail)
        })
        .collect();
    Ok(partials.into_iter().fold(T::zero(), |a, b| a + b))
}

#[derive(Clone, Copy)]
struct Node<T> {
    length: T,
    head: T,
    scale: T,
}

fn subtree_sum<T: Scalar>(f: &ModifiedSalem<T>, node: Node<T>, remaining: usize, tail: T) -> T {
    if remaining == 0 {
        return node.length * (node.head + node.scale * tail);
    }
    let s = f.system();
    (0..s.q()).fold(T::zero(), |acc, t| {
        let child = Node {
            length: node.length * s.weight(t),
            head: node.head + node.scale * f.image_offset(t),
            scale: node.scale * f.image_weight(t),
        };
        acc + subtree_sum(f, child, remaining - 1, tail)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numsys::{DigitPermutation, SalemSystem};

    #[test]
    fn closed_form_examples() {
        let id = ModifiedSalem::identity(SalemSystem::<f64>::uniform(2).unwrap());
        assert_eq!(integral_closed_form(&id).value, 0.5);

        let swap = ModifiedSalem::new(
            SalemSystem::<f64>::uniform(3).unwrap(),
            DigitPermutation::new(vec![0, 2, 1]).unwrap(),
        )
        .unwrap();
        let r = integral_closed_form(&swap);
        assert!((r.numerator - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.denominator - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.value - 0.5).abs() < 1e-15);

        let rev = ModifiedSalem::reversal(SalemSystem::<f64>::validate(2, vec![0.3, 0.7]).unwrap());
        let r = integral_closed_form(&rev);
        assert!((r.value - 0.09 / 0.58).abs() < 1e-15);
        assert!((r.value - 0.1551724).abs() < 1e-7);
    }

    #[test]
    fn riemann_examples() {
        let id = ModifiedSalem::identity(SalemSystem::<f64>::uniform(2).unwrap());
        assert!((integral_riemann(&id, 10).unwrap() - 0.5).abs() < 1e-3);

        let rev = ModifiedSalem::reversal(SalemSystem::<f64>::validate(2, vec![0.3, 0.7]).unwrap());
        assert!((integral_riemann(&rev, 14).unwrap() - 0.09 / 0.58).abs() < 1e-2);

        let swap = ModifiedSalem::new(
            SalemSystem::<f64>::uniform(3).unwrap(),
            DigitPermutation::new(vec![0, 2, 1]).unwrap(),
        )
        .unwrap();
        assert!((integral_riemann(&swap, 8).unwrap() - 0.5).abs() < 1e-2);
    }

    #[test]
    fn riemann_guards() {
        let id = ModifiedSalem::identity(SalemSystem::<f64>::uniform(10).unwrap());
        assert!(matches!(
            integral_riemann(&id, 8),
            Err(SalemError::RankTooLarge { .. })
        ));
        assert!(matches!(
            integral_riemann(&id, 400),
            Err(SalemError::RankTooLarge { .. })
        ));
        assert!(matches!(
            integral_riemann(&id, 0),
            Err(SalemError::ZeroRank)
        ));
        assert!(integral_riemann(&id, 7).is_ok());
    }
}
