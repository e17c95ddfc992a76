//! Increments of `f` on cylinders and the a.e. vanishing of its derivative.
//!
//! On the rank-`m` cylinder with base `c_1 … c_m` the increment of `f` is
//! `(Δ_{(θ(q-1))} - Δ_{(θ(0))}) Π p_{θ(c_r)}` while the cylinder has length
//! `Π p_{c_r}`, so difference quotients behave like `Π p_{θ(c_r)} / p_{c_r}`.
//! For digits drawn with frequencies `p_t` that product decays like `K^m`
//! with `K = Π_m (p_{θ(m)} / p_m)^{p_m} ≤ 1`.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SalemError};
use crate::numsys::{Cylinder, DigitString, SalemSystem};
use crate::salemfun::ModifiedSalem;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementResult<T> {
    pub cylinder: Cylinder,
    /// `f(sup) - f(inf)` with `f(sup)` taken as the limit from inside.
    pub mu: T,
    pub length: T,
    pub ratio: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable<T> {
    pub counts: Vec<usize>,
    pub r: usize,
    pub freqs: Vec<T>,
}

/// Outcome of the statistical singularity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityCheck<T> {
    pub rate: T,
    pub samples: usize,
    pub rank: usize,
    pub threshold: T,
    /// Fraction of samples whose rank-`rank` ratio fell below `threshold`.
    pub fraction_below: T,
    /// Mean of `ln(ratio_rank) / rank` over samples; tends to `ln rate`.
    pub mean_log_slope: T,
}

/// `Δ_{(θ(q-1))} - Δ_{(θ(0))}`, the increment of `f` over all of `[0, 1]`.
pub fn total_increment<T: Scalar>(f: &ModifiedSalem<T>) -> T {
    let s = f.system();
    let top = s.top_digit();
    s.constant_tail(f.theta().apply(top)) - s.constant_tail(f.theta().apply(0))
}

pub fn increment_on_cylinder<T: Scalar>(
    f: &ModifiedSalem<T>,
    cylinder: &Cylinder,
) -> Result<IncrementResult<T>> {
    let s = f.system();
    let mut image_scale = T::one();
    let mut length = T::one();
    for &c in cylinder.base() {
        s.check_digit(c)?;
        image_scale = image_scale * f.image_weight(c);
        length = length * s.weight(c);
    }
    let mu = total_increment(f) * image_scale;
    Ok(IncrementResult {
        cylinder: cylinder.clone(),
        mu,
        length,
        ratio: mu / length,
    })
}

/// Entry `m - 1` is `Π_{r ≤ m} p_{θ(c_r)} / p_{c_r}` for the rank-`m`
/// cylinder containing the point with these digits.
pub fn derivative_ratio_sequence<T: Scalar>(
    f: &ModifiedSalem<T>,
    digits: &DigitString,
    max_rank: usize,
) -> Result<Vec<T>> {
    let s = f.system();
    s.check_digits(digits)?;
    let mut acc = T::one();
    Ok(digits
        .iter()
        .take(max_rank)
        .map(|c| {
            acc = acc * f.image_weight(c) / s.weight(c);
            acc
        })
        .collect())
}

/// `K = Π_m (p_{θ(m)} / p_m)^{p_m}`. By Gibbs' inequality `K ≤ 1`, with
/// equality exactly when `p_{θ(m)} = p_m` for every digit.
pub fn singularity_rate<T: Scalar>(f: &ModifiedSalem<T>) -> T {
    let s = f.system();
    let log_k: T = (0..s.q())
        .map(|m| s.weight(m) * (f.image_weight(m) / s.weight(m)).ln())
        .sum();
    log_k.exp()
}

pub fn digit_frequencies<T: Scalar>(
    system: &SalemSystem<T>,
    digits: &DigitString,
    r: usize,
) -> Result<FrequencyTable<T>> {
    if r == 0 {
        return Err(SalemError::ZeroRank);
    }
    system.check_digits(digits)?;
    let mut counts = vec![0usize; system.q()];
    for d in digits.iter().take(r) {
        counts[d] += 1;
    }
    let total = T::from_usize_lossy(r);
    let freqs = counts
        .iter()
        .map(|&c| T::from_usize_lossy(c) / total)
        .collect();
    Ok(FrequencyTable { counts, r, freqs })
}

/// `len` i.i.d. digits with `P(t) = p_t`, i.e. the expansion of a point drawn
/// uniformly from `[0, 1]`.
pub fn sample_typical_digits<T: Scalar, R: rand::Rng + ?Sized>(
    system: &SalemSystem<T>,
    len: usize,
    rng: &mut R,
) -> DigitString {
    let weights: Vec<f64> = system.weights().iter().map(|w| w.as_f64()).collect();
    let dist = WeightedIndex::new(&weights).expect("validated weights are positive");
    DigitString::finite((0..len).map(|_| dist.sample(rng)).collect())
}

/// Generator for sample `index` of a seeded experiment. Each sample has its
/// own ChaCha stream, so results do not depend on scheduling.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `samples` typical digit strings and records how fast the
/// difference-quotient ratio decays along each of them.
pub fn singularity_check<T: Scalar>(
    f: &ModifiedSalem<T>,
    samples: usize,
    rank: usize,
    threshold: T,
    seed: u64,
) -> Result<SingularityCheck<T>> {
    if rank == 0 {
        return Err(SalemError::ZeroRank);
    }
    // ln of the rank-`rank` ratio, summed in log space so long runs cannot
    // underflow
    let logs: Vec<T> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let digits = sample_typical_digits(f.system(), rank, &mut rng);
            digits
                .iter()
                .take(rank)
                .map(|c| (f.image_weight(c) / f.system().weight(c)).ln())
                .sum()
        })
        .collect();
    let n = T::from_usize_lossy(samples.max(1));
    let ln_threshold = threshold.ln();
    let below = logs.iter().filter(|&&l| l < ln_threshold).count();
    let rank_t = T::from_usize_lossy(rank);
    let mean_log_slope = logs.iter().map(|&l| l / rank_t).sum::<T>() / n;
    Ok(SingularityCheck {
        rate: singularity_rate(f),
        samples,
        rank,
        threshold,
        fraction_below: T::from_usize_lossy(below) / n,
        mean_log_slope,
    })
}
