//! Digit systems induced by a weight vector `p_0, …, p_{q-1}` and the codec
//! between reals in `[0, 1]` and their digit expansions.
//!
//! A digit string `i_1 i_2 …` denotes
//!
//! ```text
//! β_{i_1} + Σ_{k≥2} β_{i_k} · p_{i_1} ⋯ p_{i_{k-1}}
//! ```
//!
//! where `β_t = p_0 + … + p_{t-1}`. Eventually periodic strings are summed in
//! closed form, so rational points and periodic orbits are exact up to
//! floating point rounding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SalemError};
use crate::scalar::Scalar;

/// Longest expansion produced by [`SalemSystem::default_depth`].
pub const MAX_DEFAULT_DEPTH: usize = 2000;

/// The weights `p_t`, their cumulative sums `β_t`, and the digit count `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemParams<T>", bound = "T: Scalar")]
pub struct SalemSystem<T> {
    q: usize,
    p: Vec<T>,
    beta: Vec<T>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct SystemParams<T> {
    q: usize,
    p: Vec<T>,
}

impl<T: Scalar> TryFrom<SystemParams<T>> for SalemSystem<T> {
    type Error = SalemError;

    fn try_from(params: SystemParams<T>) -> Result<Self> {
        Self::validate(params.q, params.p)
    }
}

impl<T: Scalar> SalemSystem<T> {
    /// Checks `q ≥ 2`, `p_t ∈ (0, 1)` and `Σ p_t = 1`, then builds `β`.
    pub fn validate(q: usize, p: Vec<T>) -> Result<Self> {
        if q < 2 {
            return Err(SalemError::TooFewDigits { q });
        }
        if p.len() != q {
            return Err(SalemError::LengthMismatch {
                expected: q,
                found: p.len(),
            });
        }
        for (index, &w) in p.iter().enumerate() {
            if !(w > T::zero() && w < T::one()) {
                return Err(SalemError::WeightOutOfRange {
                    index,
                    value: w.as_f64(),
                });
            }
        }
        let sum: T = p.iter().copied().sum();
        if (sum - T::one()).abs() > T::weight_tolerance() {
            return Err(SalemError::WeightSumMismatch { sum: sum.as_f64() });
        }
        let beta = cumulative(&p);
        Ok(Self { q, p, beta })
    }

    /// Equal weights `1/q`.
    pub fn uniform(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(SalemError::TooFewDigits { q });
        }
        let w = T::one() / T::from_usize_lossy(q);
        Self::validate(q, vec![w; q])
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn weights(&self) -> &[T] {
        &self.p
    }

    /// Cumulative sums `β_0 = 0, …, β_q ≈ 1`; `q + 1` entries.
    pub fn offsets(&self) -> &[T] {
        &self.beta
    }

    #[inline]
    pub fn weight(&self, digit: usize) -> T {
        self.p[digit]
    }

    #[inline]
    pub fn offset(&self, digit: usize) -> T {
        self.beta[digit]
    }

    pub fn max_weight(&self) -> T {
        self.p.iter().copied().fold(T::zero(), T::max)
    }

    pub fn min_weight(&self) -> T {
        self.p.iter().copied().fold(T::one(), T::min)
    }

    #[inline]
    pub fn top_digit(&self) -> usize {
        self.q - 1
    }

    /// Value of the constant string `(j)(j)(j)…`, i.e. `β_j / (1 - p_j)`.
    pub fn constant_tail(&self, digit: usize) -> T {
        if digit == self.top_digit() {
            // β_{q-1} + p_{q-1} = 1 in exact arithmetic
            return T::one();
        }
        self.beta[digit] / (T::one() - self.p[digit])
    }

    /// Smallest depth with `(max p)^depth < 1e-14`, capped at
    /// [`MAX_DEFAULT_DEPTH`].
    pub fn default_depth(&self) -> usize {
        let target = T::lit(1e-14).ln();
        let per_digit = self.max_weight().ln();
        let depth = (target / per_digit)
            .ceil()
            .to_usize()
            .unwrap_or(MAX_DEFAULT_DEPTH);
        depth.clamp(1, MAX_DEFAULT_DEPTH)
    }

    pub fn check_digit(&self, digit: usize) -> Result<()> {
        if digit < self.q {
            Ok(())
        } else {
            Err(SalemError::DigitOutOfRange { digit, q: self.q })
        }
    }

    pub fn check_digits(&self, digits: &DigitString) -> Result<()> {
        digits.all_digits().try_for_each(|d| self.check_digit(d))
    }

    /// Index `t` with `β_t ≤ r < β_{t+1}`; values at or above `β_{q-1}` map to
    /// the top digit.
    fn locate(&self, r: T) -> usize {
        // β is sorted; partition_point gives the first β_t > r
        let idx = self.beta[..self.q].partition_point(|&b| b <= r);
        idx.saturating_sub(1)
    }

    /// Greedy expansion of `x` to `depth` digits.
    ///
    /// At a boundary `x = β_t` the digit `t` is emitted with a zero tail, so the
    /// result is always in canonical form. Values closer to a cylinder boundary
    /// than [`Scalar::snap_tolerance`] are treated as lying on it. `x = 1` maps
    /// to the constant top-digit string.
    pub fn encode(&self, x: T, depth: usize) -> Result<DigitString> {
        if depth == 0 {
            return Err(SalemError::ZeroDepth);
        }
        if !(x >= T::zero() && x <= T::one()) {
            return Err(SalemError::ArgumentOutOfDomain { value: x.as_f64() });
        }
        let top = self.top_digit();
        let snap = T::snap_tolerance();
        let mut digits = Vec::with_capacity(depth);
        let mut rem = x;
        let mut scale = T::one();
        while digits.len() < depth && scale > snap {
            let t = self.locate(rem);
            let upper = if t == top { T::one() } else { self.beta[t + 1] };
            // only a gap in the upper half of the cell can be rounding noise
            let gap = upper - rem;
            if gap * scale <= snap && gap + gap < self.p[t] {
                if t < top {
                    digits.push(t + 1);
                } else {
                    // right end of the current cylinder: carry into the last
                    // digit that can still be incremented
                    match digits.iter().rposition(|&d| d < top) {
                        Some(j) => {
                            digits.truncate(j + 1);
                            digits[j] += 1;
                        }
                        None => return Ok(DigitString::one(self.q, depth)),
                    }
                }
                break;
            }
            digits.push(t);
            rem = ((rem - self.beta[t]) / self.p[t])
                .max(T::zero())
                .min(T::one());
            scale = scale * self.p[t];
        }
        digits.resize(depth, 0);
        Ok(DigitString {
            prefix: digits,
            period: None,
            canonical: true,
        })
    }

    /// Series value of a digit string; periodic tails in closed form.
    pub fn decode(&self, digits: &DigitString) -> Result<T> {
        self.check_digits(digits)?;
        Ok(self.decode_unchecked(&digits.prefix, digits.period.as_deref()))
    }

    pub(crate) fn decode_unchecked(&self, prefix: &[usize], period: Option<&[usize]>) -> T {
        let (head, scale) = self.partial_sum(prefix);
        let tail = match period {
            None => T::zero(),
            Some(per) => self.periodic_value(per),
        };
        (head + scale * tail).max(T::zero()).min(T::one())
    }

    /// `(Σ_k β_{d_k} Π_{r<k} p_{d_r}, Π_k p_{d_k})` over a finite run of digits.
    pub(crate) fn partial_sum(&self, digits: &[usize]) -> (T, T) {
        let mut value = T::zero();
        let mut scale = T::one();
        for &d in digits {
            if scale == T::zero() {
                break;
            }
            value = value + self.beta[d] * scale;
            scale = scale * self.p[d];
        }
        (value, scale)
    }

    /// Value of the purely periodic string `(period)`.
    pub(crate) fn periodic_value(&self, period: &[usize]) -> T {
        if let [d] = period {
            return self.constant_tail(*d);
        }
        if period.iter().all(|&d| d == self.top_digit()) {
            return T::one();
        }
        let (v, s) = self.partial_sum(period);
        v / (T::one() - s)
    }

    /// Rewrites a `(q-1)`-tail into the equivalent terminating expansion.
    pub fn canonicalize(&self, digits: &DigitString) -> Result<DigitString> {
        self.check_digits(digits)?;
        let top = self.top_digit();
        match &digits.period {
            Some(per) if per.iter().all(|&d| d == top) => {
                let mut prefix = digits.prefix.clone();
                while prefix.last() == Some(&top) {
                    prefix.pop();
                }
                match prefix.last_mut() {
                    Some(last) => {
                        *last += 1;
                        Ok(DigitString {
                            prefix,
                            period: None,
                            canonical: true,
                        })
                    }
                    None => Ok(DigitString::one(self.q, 0)),
                }
            }
            _ => Ok(DigitString {
                canonical: true,
                ..digits.clone()
            }),
        }
    }

    /// `σ^n`: drops the first `n` digits, continuing through the period when
    /// the prefix is shorter than `n`.
    pub fn shift(&self, digits: &DigitString, n: usize) -> Result<DigitString> {
        self.check_digits(digits)?;
        Ok(digits.shifted(n))
    }

    pub fn cylinder_bounds(&self, cylinder: &Cylinder) -> Result<CylinderBounds<T>> {
        cylinder
            .base()
            .iter()
            .try_for_each(|&d| self.check_digit(d))?;
        let (inf, length) = self.partial_sum(cylinder.base());
        Ok(CylinderBounds {
            inf,
            sup: inf + length,
            length,
        })
    }
}

fn cumulative<T: Scalar>(p: &[T]) -> Vec<T> {
    let mut beta = Vec::with_capacity(p.len() + 1);
    let mut acc = T::zero();
    beta.push(acc);
    for &w in p {
        acc = acc + w;
        beta.push(acc);
    }
    beta
}

/// A bijection of the digits `0..q`; entry `t` of the map is `θ(t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DigitPermutation {
    map: Vec<usize>,
}

impl DigitPermutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let q = map.len();
        let mut seen = vec![false; q];
        for &v in &map {
            if v >= q || std::mem::replace(&mut seen[v], true) {
                return Err(SalemError::NotAPermutation { map, q });
            }
        }
        Ok(Self { map })
    }

    pub fn identity(q: usize) -> Self {
        Self {
            map: (0..q).collect(),
        }
    }

    /// `t ↦ q - 1 - t`.
    pub fn reversal(q: usize) -> Self {
        Self {
            map: (0..q).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, digit: usize) -> usize {
        self.map[digit]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(t, &v)| t == v)
    }

    pub fn is_reversal(&self) -> bool {
        let q = self.map.len();
        self.map.iter().enumerate().all(|(t, &v)| v == q - 1 - t)
    }

    /// Digits `r` with `θ(r) = r`, ascending.
    pub fn fixed_digits(&self) -> Vec<usize> {
        self.map
            .iter()
            .enumerate()
            .filter_map(|(t, &v)| (t == v).then_some(t))
            .collect()
    }
}

impl TryFrom<Vec<usize>> for DigitPermutation {
    type Error = SalemError;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Self::new(map)
    }
}

impl From<DigitPermutation> for Vec<usize> {
    fn from(p: DigitPermutation) -> Self {
        p.map
    }
}

/// A finite prefix followed by a repeating period. Without a period the tail
/// is all zeros.
///
/// Equality compares digits only, not the canonical flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DigitStringRepr", into = "DigitStringRepr")]
pub struct DigitString {
    prefix: Vec<usize>,
    period: Option<Vec<usize>>,
    canonical: bool,
}

#[derive(Serialize, Deserialize)]
struct DigitStringRepr {
    prefix: Vec<usize>,
    period: Option<Vec<usize>>,
}

impl TryFrom<DigitStringRepr> for DigitString {
    type Error = SalemError;

    fn try_from(r: DigitStringRepr) -> Result<Self> {
        match r.period {
            Some(period) => DigitString::periodic(r.prefix, period),
            None => Ok(DigitString::finite(r.prefix)),
        }
    }
}

impl From<DigitString> for DigitStringRepr {
    fn from(d: DigitString) -> Self {
        DigitStringRepr {
            prefix: d.prefix,
            period: d.period,
        }
    }
}

impl PartialEq for DigitString {
    fn eq(&self, other: &Self) -> bool {
        self.prefix == other.prefix && self.period == other.period
    }
}

impl Eq for DigitString {}

impl DigitString {
    /// Terminating expansion (implicit zero tail).
    pub fn finite(prefix: Vec<usize>) -> Self {
        Self {
            prefix,
            period: None,
            canonical: false,
        }
    }

    pub fn periodic(prefix: Vec<usize>, period: Vec<usize>) -> Result<Self> {
        if period.is_empty() {
            return Err(SalemError::EmptyPeriod);
        }
        Ok(Self {
            prefix,
            period: Some(period),
            canonical: false,
        })
    }

    /// The expansion of 1: `prefix_len` top digits followed by the top-digit
    /// period.
    pub fn one(q: usize, prefix_len: usize) -> Self {
        Self {
            prefix: vec![q - 1; prefix_len],
            period: Some(vec![q - 1]),
            canonical: true,
        }
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn period(&self) -> Option<&[usize]> {
        self.period.as_deref()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// True when every digit after the prefix is zero.
    pub fn has_zero_tail(&self) -> bool {
        self.period
            .as_ref()
            .is_none_or(|per| per.iter().all(|&d| d == 0))
    }

    /// Digit at 0-based position `k`.
    pub fn digit(&self, k: usize) -> usize {
        if let Some(&d) = self.prefix.get(k) {
            return d;
        }
        match &self.period {
            None => 0,
            Some(per) => per[(k - self.prefix.len()) % per.len()],
        }
    }

    /// Infinite iterator over the digits.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..).map(move |k| self.digit(k))
    }

    /// The first `n` digits.
    pub fn leading(&self, n: usize) -> Vec<usize> {
        self.iter().take(n).collect()
    }

    fn all_digits(&self) -> impl Iterator<Item = usize> + '_ {
        self.prefix
            .iter()
            .chain(self.period.iter().flatten())
            .copied()
    }

    /// Applies `f` to every stored digit, keeping the structure.
    pub(crate) fn map_digits(
        &self,
        f: impl Fn(usize) -> usize,
    ) -> (Vec<usize>, Option<Vec<usize>>) {
        let prefix = self.prefix.iter().map(|&d| f(d)).collect();
        let period = self
            .period
            .as_ref()
            .map(|per| per.iter().map(|&d| f(d)).collect());
        (prefix, period)
    }

    pub(crate) fn shifted(&self, n: usize) -> DigitString {
        if n <= self.prefix.len() {
            return DigitString {
                prefix: self.prefix[n..].to_vec(),
                period: self.period.clone(),
                canonical: self.canonical,
            };
        }
        let period = self.period.as_ref().map(|per| {
            let k = (n - self.prefix.len()) % per.len();
            let mut rotated = per[k..].to_vec();
            rotated.extend_from_slice(&per[..k]);
            rotated
        });
        DigitString {
            prefix: Vec::new(),
            period,
            canonical: self.canonical,
        }
    }
}

impl fmt::Display for DigitString {
    /// `1,0,2` for a terminating string, `1,0(2)` with a period.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ds: &[usize]| {
            ds.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}", join(&self.prefix))?;
        if let Some(per) = &self.period {
            write!(f, "({})", join(per))?;
        }
        Ok(())
    }
}

/// Error from parsing the `1,0(2)` text form of a digit string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse digit string {0:?}")]
pub struct ParseDigitsError(pub String);

impl FromStr for DigitString {
    type Err = ParseDigitsError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let err = || ParseDigitsError(s.to_string());
        let parse_list = |t: &str| -> std::result::Result<Vec<usize>, ParseDigitsError> {
            let t = t.trim();
            if t.is_empty() {
                return Ok(Vec::new());
            }
            t.split(',')
                .map(|d| d.trim().parse::<usize>().map_err(|_| err()))
                .collect()
        };
        let s_trim = s.trim();
        match s_trim.find('(') {
            None => Ok(DigitString::finite(parse_list(s_trim)?)),
            Some(open) => {
                let rest = &s_trim[open + 1..];
                let body = rest.strip_suffix(')').ok_or_else(err)?;
                let prefix = parse_list(s_trim[..open].trim_end_matches(','))?;
                let period = parse_list(body)?;
                DigitString::periodic(prefix, period).map_err(|_| err())
            }
        }
    }
}

/// Base `c_1 … c_m` of a rank-`m` cylinder, the closed interval of all points
/// whose expansion starts with that base.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    base: Vec<usize>,
}

impl Cylinder {
    pub fn new(base: Vec<usize>) -> Result<Self> {
        if base.is_empty() {
            return Err(SalemError::EmptyCylinder);
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.base.len()
    }

    /// The `q` cylinders of the next rank contained in this one.
    pub fn children(&self, q: usize) -> impl Iterator<Item = Cylinder> + '_ {
        (0..q).map(move |t| {
            let mut base = self.base.clone();
            base.push(t);
            Cylinder { base }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderBounds<T> {
    pub inf: T,
    pub sup: T,
    pub length: T,
}
