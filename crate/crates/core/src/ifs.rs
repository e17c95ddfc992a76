//! The graph of `f` as the attractor of `q` axis-aligned affine maps
//!
//! ```text
//! ψ_t(x, y) = (p_t x + β_t, p_{θ(t)} y + β_{θ(t)})
//! ```
//!
//! together with point-cloud generation, a self-affinity check, the area of
//! the rectangle covers and a box-counting estimate of the graph dimension.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SalemError};
use crate::salemfun::ModifiedSalem;
use crate::scalar::Scalar;

/// Largest deterministic cloud [`attractor_points`] will build.
pub const MAX_CLOUD_POINTS: usize = 10_000_000;

/// Chaos-game iterates discarded before points are recorded.
pub const CHAOS_BURN_IN: usize = 50;

pub const MIN_BOX_COUNT_POINTS: usize = 1000;
pub const MIN_BOX_COUNT_LEVELS: usize = 3;

/// `ψ_t`: `x' = x_scale x + x_offset`, `y' = y_scale y + y_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinePair<T> {
    pub digit: usize,
    pub x_scale: T,
    pub x_offset: T,
    pub y_scale: T,
    pub y_offset: T,
}

impl<T: Scalar> AffinePair<T> {
    /// Clamped to the unit square, which rounding in `β_t + p_t` can leave.
    #[inline]
    pub fn apply(&self, (x, y): (T, T)) -> (T, T) {
        let unit = |v: T| v.max(T::zero()).min(T::one());
        (
            unit(self.x_scale * x + self.x_offset),
            unit(self.y_scale * y + self.y_offset),
        )
    }
}

/// How a cloud was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Generation {
    /// All `q^depth` compositions applied to the anchor `(0, f(0))`.
    Deterministic { depth: usize },
    /// `steps` random maps from a seeded generator.
    Chaos { steps: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphCloud<T> {
    pub points: Vec<(T, T)>,
    pub generation: Generation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfAffinityReport<T> {
    pub max_deviation: T,
    pub failures: usize,
    pub checked: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverReport<T> {
    #[serde(rename = "L1")]
    pub l1: T,
    pub rank: usize,
    pub total_area: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountReport<T> {
    pub levels: Vec<T>,
    pub counts: Vec<usize>,
    pub slope: T,
}

pub fn ifs_maps<T: Scalar>(f: &ModifiedSalem<T>) -> Vec<AffinePair<T>> {
    let s = f.system();
    (0..s.q())
        .map(|t| AffinePair {
            digit: t,
            x_scale: s.weight(t),
            x_offset: s.offset(t),
            y_scale: f.image_weight(t),
            y_offset: f.image_offset(t),
        })
        .collect()
}

/// `(0, f(0))` with `f(0) = β_{θ(0)} / (1 - p_{θ(0)})`.
pub fn anchor<T: Scalar>(f: &ModifiedSalem<T>) -> (T, T) {
    (T::zero(), f.system().constant_tail(f.theta().apply(0)))
}

/// Deterministic clouds list points in lexicographic address order: the point
/// for `t_1 … t_d` is `ψ_{t_1} ∘ … ∘ ψ_{t_d}(anchor)`, which is
/// `(x, f(x))` at the left endpoint `x` of the cylinder `t_1 … t_d`.
pub fn attractor_points<T: Scalar>(
    f: &ModifiedSalem<T>,
    mode: Generation,
) -> Result<GraphCloud<T>> {
    let maps = ifs_maps(f);
    let start = anchor(f);
    let points = match mode {
        Generation::Deterministic { depth } => {
            let q = maps.len();
            let total = u32::try_from(depth)
                .ok()
                .and_then(|d| q.checked_pow(d))
                .filter(|&n| n <= MAX_CLOUD_POINTS);
            if total.is_none() {
                return Err(SalemError::DepthTooLarge {
                    depth,
                    q,
                    limit: MAX_CLOUD_POINTS,
                });
            }
            let mut cloud = vec![start];
            for _ in 0..depth {
                let blocks: Vec<Vec<(T, T)>> = maps
                    .par_iter()
                    .map(|m| cloud.iter().map(|&p| m.apply(p)).collect())
                    .collect();
                cloud = blocks.concat();
            }
            cloud
        }
        Generation::Chaos { steps, seed } => {
            if steps == 0 {
                return Err(SalemError::ZeroDepth);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut p = start;
            let mut out = Vec::with_capacity(steps.saturating_sub(CHAOS_BURN_IN));
            for i in 0..steps {
                p = maps[rng.gen_range(0..maps.len())].apply(p);
                if i >= CHAOS_BURN_IN {
                    out.push(p);
                }
            }
            out
        }
    };
    Ok(GraphCloud {
        points,
        generation: mode,
    })
}

/// Maps every cloud point through every `ψ_t` and checks that the image lies
/// on the graph: `|ψ_t(P).y - f(ψ_t(P).x)| ≤ tol`.
pub fn verify_self_affinity<T: Scalar>(
    f: &ModifiedSalem<T>,
    cloud: &GraphCloud<T>,
    tol: T,
) -> Result<SelfAffinityReport<T>> {
    let maps = ifs_maps(f);
    let deviations: Vec<T> = cloud
        .points
        .par_iter()
        .flat_map_iter(|&p| maps.iter().map(move |m| m.apply(p)))
        .map(|(x, y)| Ok((y - f.value(x)?).abs()))
        .collect::<Result<_>>()?;
    Ok(SelfAffinityReport {
        max_deviation: deviations.iter().copied().fold(T::zero(), T::max),
        failures: deviations
            .iter()
            .filter(|&&d| d.is_nan() || d > tol)
            .count(),
        checked: deviations.len(),
    })
}

/// `L_1 = Σ p_m p_{θ(m)}` is the total area of the `q` rank-1 rectangles
/// `[β_t, β_{t+1}] × [β_{θ(t)}, β_{θ(t)+1}]` that carry the graph; at rank `r`
/// the `q^r` carrying rectangles have total area `L_1^r`.
pub fn cover_area<T: Scalar>(f: &ModifiedSalem<T>, rank: usize) -> Result<CoverReport<T>> {
    if rank == 0 {
        return Err(SalemError::ZeroRank);
    }
    let s = f.system();
    let l1: T = (0..s.q()).map(|m| s.weight(m) * f.image_weight(m)).sum();
    let exponent = i32::try_from(rank).unwrap_or(i32::MAX);
    Ok(CoverReport {
        l1,
        rank,
        total_area: l1.powi(exponent),
    })
}

/// Grid sizes `2^-from, …, 2^-to`.
pub fn dyadic_levels<T: Scalar>(from: u32, to: u32) -> Vec<T> {
    (from..=to).map(|k| T::lit(0.5f64.powi(k as i32))).collect()
}

/// Counts occupied boxes of each dyadic grid and fits `ln N(ε)` against
/// `ln(1/ε)` by ordinary least squares.
///
/// Boxes are half-open on the left, `(kε, (k+1)ε]`, so a point on a grid line
/// belongs to the lower-index box; `0` belongs to box `0`.
pub fn box_count<T: Scalar>(cloud: &GraphCloud<T>, levels: &[T]) -> Result<BoxCountReport<T>> {
    if cloud.points.len() < MIN_BOX_COUNT_POINTS {
        return Err(SalemError::InsufficientPoints {
            required: MIN_BOX_COUNT_POINTS,
            found: cloud.points.len(),
        });
    }
    if levels.len() < MIN_BOX_COUNT_LEVELS {
        return Err(SalemError::TooFewLevels {
            required: MIN_BOX_COUNT_LEVELS,
            found: levels.len(),
        });
    }
    let exponents = dyadic_exponents(levels)?;

    let counts: Vec<usize> = exponents
        .par_iter()
        .map(|&k| {
            let n = T::lit(2f64.powi(k as i32));
            let last = (1u64 << k) - 1;
            let index = |v: T| -> u64 {
                let c = (v * n).ceil().to_u64().unwrap_or(0);
                c.saturating_sub(1).min(last)
            };
            cloud
                .points
                .iter()
                .map(|&(x, y)| (index(x), index(y)))
                .collect::<HashSet<_>>()
                .len()
        })
        .collect();

    let ln2 = T::lit(std::f64::consts::LN_2);
    let xs: Vec<T> = exponents.iter().map(|&k| T::lit(k as f64) * ln2).collect();
    let ys: Vec<T> = counts
        .iter()
        .map(|&c| T::from_usize_lossy(c).ln())
        .collect();
    Ok(BoxCountReport {
        levels: levels.to_vec(),
        counts,
        slope: least_squares_slope(&xs, &ys),
    })
}

fn dyadic_exponents<T: Scalar>(levels: &[T]) -> Result<Vec<u32>> {
    let mut out: Vec<u32> = Vec::with_capacity(levels.len());
    for &eps in levels {
        let invalid = |reason: String| SalemError::InvalidLevels { reason };
        if !(eps > T::zero() && eps <= T::one()) {
            return Err(invalid(format!("{eps} is not in (0, 1]")));
        }
        let k = -eps.log2();
        let kr = k.round();
        let k_int = kr.to_u32().filter(|&k| k <= 40);
        match k_int {
            Some(k) if T::lit(0.5f64.powi(k as i32)) == eps => {
                if out.last().is_some_and(|&prev| prev >= k) {
                    return Err(invalid("sizes must strictly decrease".into()));
                }
                out.push(k);
            }
            _ => return Err(invalid(format!("{eps} is not 2^-k for 0 <= k <= 40"))),
        }
    }
    Ok(out)
}

fn least_squares_slope<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let (sxy, sxx) = xs
        .iter()
        .zip(ys)
        .fold((T::zero(), T::zero()), |(sxy, sxx), (&x, &y)| {
            (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
        });
    sxy / sxx
}

#[derive(Serialize, Deserialize)]
struct CloudRow<T> {
    x: T,
    y: T,
}

/// Writes `x,y` rows under a header line. Values use the shortest
/// representation that parses back to the same float.
pub fn write_csv<T: Scalar, W: Write>(points: &[(T, T)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for &(x, y) in points {
        w.serialize(CloudRow { x, y })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: Scalar, R: io::Read>(input: R) -> csv::Result<Vec<(T, T)>> {
    csv::Reader::from_reader(input)
        .deserialize::<CloudRow<T>>()
        .map(|row| row.map(|r| (r.x, r.y)))
        .collect()
}

/// One `{"x":…,"y":…}` object per line.
pub fn write_json_lines<T: Scalar, W: Write>(points: &[(T, T)], mut out: W) -> io::Result<()> {
    for &(x, y) in points {
        serde_json::to_writer(&mut out, &CloudRow { x, y })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_json_lines<T: Scalar, R: BufRead>(input: R) -> io::Result<Vec<(T, T)>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|line| {
            let row: CloudRow<T> = serde_json::from_str(&line?)?;
            Ok((row.x, row.y))
        })
        .collect()
}
