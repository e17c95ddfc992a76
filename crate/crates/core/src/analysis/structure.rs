//! Fixed points and monotonicity of `f`.

use serde::{Deserialize, Serialize};

use crate::analysis::dimension::{moran_dimension, MoranResult};
use crate::error::{Result, SalemError};
use crate::salemfun::ModifiedSalem;
use crate::scalar::Scalar;

/// Largest number of cylinder endpoints [`monotonicity_witness`] will scan.
pub const MAX_WITNESS_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedSetKind {
    Empty,
    Singleton,
    Interval,
    Fractal,
}

/// The set of points all of whose digits are fixed by `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedSetClass<T> {
    pub kind: FixedSetKind,
    pub fixed_digits: Vec<usize>,
    pub point: Option<T>,
    pub dimension: Option<MoranResult<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointPair<T> {
    pub x1: T,
    pub x2: T,
    pub y1: T,
    pub y2: T,
}

/// Evidence that `f` is not monotone: `decreasing` has `x1 < x2` and
/// `f(x1) > f(x2)`, `increasing` has `x1 < x2` and `f(x1) < f(x2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityWitness<T> {
    pub decreasing: PointPair<T>,
    pub increasing: PointPair<T>,
}

impl<T: Scalar> MonotonicityWitness<T> {
    pub fn pair(&self) -> (T, T) {
        (self.decreasing.x1, self.decreasing.x2)
    }
}

pub fn fixed_point_set<T: Scalar>(f: &ModifiedSalem<T>) -> Result<FixedSetClass<T>> {
    let s = f.system();
    let fixed = f.theta().fixed_digits();
    let class = match fixed.len() {
        0 => FixedSetClass {
            kind: FixedSetKind::Empty,
            fixed_digits: fixed,
            point: None,
            dimension: None,
        },
        1 => FixedSetClass {
            kind: FixedSetKind::Singleton,
            point: Some(s.constant_tail(fixed[0])),
            fixed_digits: fixed,
            dimension: None,
        },
        n => {
            let dimension = moran_dimension(s, &fixed)?;
            let kind = if n == s.q() {
                FixedSetKind::Interval
            } else {
                FixedSetKind::Fractal
            };
            FixedSetClass {
                kind,
                fixed_digits: fixed,
                point: None,
                dimension: Some(dimension),
            }
        }
    };
    Ok(class)
}

/// Scans the left endpoints of all cylinders of rank `1..=search_rank` in
/// increasing order and reports the first adjacent decreasing pair and the
/// first adjacent increasing pair. Returns `None` unless both exist, so the
/// identity (increasing) and the reversal (decreasing) yield no witness.
pub fn monotonicity_witness<T: Scalar>(
    f: &ModifiedSalem<T>,
    search_rank: usize,
) -> Result<Option<MonotonicityWitness<T>>> {
    if search_rank == 0 {
        return Err(SalemError::ZeroRank);
    }
    let q = f.system().q();
    let limit = u32::try_from(search_rank)
        .ok()
        .and_then(|r| q.checked_pow(r))
        .filter(|&n| n <= MAX_WITNESS_POINTS);
    if limit.is_none() {
        return Err(SalemError::RankTooLarge {
            rank: search_rank,
            q,
            limit: MAX_WITNESS_POINTS,
        });
    }

    let mut points = vec![(T::zero(), endpoint_value(f, &[]))];
    let mut base = Vec::with_capacity(search_rank);
    collect_endpoints(f, &mut base, search_rank, &mut points);
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite endpoints"));

    let tol = T::snap_tolerance();
    let mut decreasing = None;
    let mut increasing = None;
    for w in points.windows(2) {
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        let pair = PointPair { x1, x2, y1, y2 };
        if decreasing.is_none() && y1 - y2 > tol {
            decreasing = Some(pair);
        }
        if increasing.is_none() && y2 - y1 > tol {
            increasing = Some(pair);
        }
        if decreasing.is_some() && increasing.is_some() {
            break;
        }
    }
    Ok(decreasing
        .zip(increasing)
        .map(|(decreasing, increasing)| MonotonicityWitness {
            decreasing,
            increasing,
        }))
}

/// `f` at the left endpoint of the cylinder with this base, in closed form.
fn endpoint_value<T: Scalar>(f: &ModifiedSalem<T>, base: &[usize]) -> T {
    let image: Vec<usize> = base.iter().map(|&d| f.theta().apply(d)).collect();
    f.system()
        .decode_unchecked(&image, Some(&[f.theta().apply(0)]))
}

/// Pushes every endpoint whose base ends in a nonzero digit, so each
/// rational appears once.
fn collect_endpoints<T: Scalar>(
    f: &ModifiedSalem<T>,
    base: &mut Vec<usize>,
    remaining: usize,
    out: &mut Vec<(T, T)>,
) {
    if remaining == 0 {
        return;
    }
    for t in 0..f.system().q() {
        base.push(t);
        if t != 0 {
            let x = f.system().decode_unchecked(base, None);
            out.push((x, endpoint_value(f, base)));
        }
        collect_endpoints(f, base, remaining - 1, out);
        base.pop();
    }
}
