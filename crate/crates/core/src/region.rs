//! Order-statistic samples and regions built as unions of intervals.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// The order statistics `X(1) <= ... <= X(n)` of a nonempty finite sample.
///
/// `X(0)` and `X(n+1)` are taken to be `-inf` and `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    pub fn new(data: &[f64]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::domain("sample is empty"));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::domain(alloc::format!("sample contains non-finite value {bad}")));
        }
        let mut values = data.to_vec();
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `X(k)` for `k` in `0..=n+1`, one-based, with the infinite conventions at the ends.
    pub fn order_stat(&self, k: usize) -> f64 {
        match k {
            0 => f64::NEG_INFINITY,
            k if k > self.len() => f64::INFINITY,
            k => self.values[k - 1],
        }
    }

    /// Mean of the two central order statistics when `n` is even.
    pub fn median(&self) -> f64 {
        median_of_sorted(&self.values)
    }

    /// Number of observations `<= point`.
    pub fn count_at_most(&self, point: f64) -> usize {
        self.values.partition_point(|&x| x <= point)
    }

    /// Consecutive differences `X(k+1) - X(k)` for `k = 1..n-1`.
    pub fn spacings(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mapped: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        Self::new(&mapped)
    }
}

pub(crate) fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// `[lo, hi)`, or `[lo, hi]` when `closed_hi` is set. Either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub closed_hi: bool,
}

impl Interval {
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, closed_hi: false }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, closed_hi: true }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !self.closed_hi)
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn contains(&self, point: f64) -> bool {
        self.lo <= point && (point < self.hi || (self.closed_hi && point == self.hi))
    }
}

/// A finite union of disjoint, ascending intervals, with touching pieces merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region {
    intervals: Vec<Interval>,
}

impl Region {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(interval: Interval) -> Self {
        Self::from_intervals([interval])
    }

    /// Normalizes an arbitrary collection: drops empty pieces, sorts, and merges
    /// overlapping or touching intervals.
    pub fn from_intervals(pieces: impl IntoIterator<Item = Interval>) -> Self {
        let mut pieces: Vec<Interval> = pieces.into_iter().filter(|i| !i.is_empty()).collect();
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut intervals: Vec<Interval> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match intervals.last_mut() {
                Some(last) if piece.lo <= last.hi => {
                    if piece.hi > last.hi {
                        last.hi = piece.hi;
                        last.closed_hi = piece.closed_hi;
                    } else if piece.hi == last.hi {
                        last.closed_hi |= piece.closed_hi;
                    }
                }
                _ => intervals.push(piece),
            }
        }
        Self { intervals }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure; `+inf` when any piece is unbounded.
    pub fn content(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, point: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(point))
    }

    pub fn shift(&self, c: f64) -> Self {
        Self {
            intervals: self
                .intervals
                .iter()
                .map(|i| Interval { lo: i.lo + c, hi: i.hi + c, ..*i })
                .collect(),
        }
    }
}

/// A realized randomizer `u` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RandomizerDraw(f64);

impl RandomizerDraw {
    pub fn new(u: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&u) {
            Ok(Self(u))
        } else {
            Err(Error::domain(alloc::format!("randomizer must lie in [0, 1], got {u}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Union of the spacings `[X(k), X(k+1))` over `k` in `k_set`.
pub fn region_from_gamma0(sample: &SortedSample, k_set: &[usize]) -> Result<Region> {
    let n = sample.len();
    if let Some(&bad) = k_set.iter().find(|&&k| k > n) {
        return Err(Error::domain(alloc::format!("index {bad} outside 0..={n}")));
    }
    Ok(Region::from_intervals(k_set.iter().map(|&k| {
        Interval::half_open(sample.order_stat(k), sample.order_stat(k + 1))
    })))
}
