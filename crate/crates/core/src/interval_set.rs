//! Finite disjoint unions of bounded open intervals of the real line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite union of pairwise disjoint open intervals, kept sorted by left
/// endpoint with strictly increasing endpoints.
///
/// Serializes as a JSON array of `[left, right]` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from arbitrary-order components. Components must be
    /// finite, nondegenerate and must not overlap or touch.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(l, r) in &intervals {
            if !l.is_finite() || !r.is_finite() {
                return Err(Error::InvalidInterval { left: l, right: r, reason: "endpoints must be finite" });
            }
            if l >= r {
                return Err(Error::InvalidInterval { left: l, right: r, reason: "left must be < right" });
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in intervals.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::InvalidInterval {
                    left: w[1].0,
                    right: w[1].1,
                    reason: "intervals must be disjoint with distinct endpoints",
                });
            }
        }
        Ok(Self { intervals })
    }

    pub fn single(left: f64, right: f64) -> Result<Self> {
        Self::new(vec![(left, right)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    /// Membership in the open set.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(l, r)| l < x && x < r)
    }

    pub fn is_boundary(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(l, r)| x == l || x == r)
    }

    /// Distance from `x` to the nearest endpoint.
    pub fn boundary_distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .flat_map(|&(l, r)| [(x - l).abs(), (x - r).abs()])
            .fold(f64::INFINITY, f64::min)
    }

    /// Returns `a·X + c`.
    pub fn scale_translate(&self, a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::NonPositiveScale(a));
        }
        Ok(Self { intervals: self.intervals.iter().map(|&(l, r)| (a * l + c, a * r + c)).collect() })
    }

    /// Union with a set whose closure is disjoint from this one.
    pub fn disjoint_union(&self, other: &IntervalSet) -> Result<Self> {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::new(all)
    }

    /// Removes the open interval `(left, right)`; the cut must lie inside a
    /// single component so that no endpoints collide.
    pub fn remove(&self, left: f64, right: f64) -> Result<Self> {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for &(l, r) in &self.intervals {
            if right <= l || left >= r {
                out.push((l, r));
                continue;
            }
            if left > l {
                out.push((l, left));
            }
            if right < r {
                out.push((right, r));
            }
        }
        Self::new(out)
    }

    /// Measure of the intersection with the closed window `[lo, hi]`.
    pub fn measure_in(&self, lo: f64, hi: f64) -> f64 {
        self.intervals.iter().map(|&(l, r)| (r.min(hi) - l.max(lo)).max(0.0)).sum()
    }

    /// Largest measure captured by any window of length `width`.
    ///
    /// The captured measure is piecewise linear in the window position, so
    /// the maximum is attained where a window edge meets an endpoint.
    pub fn max_window_measure(&self, width: f64) -> f64 {
        self.intervals
            .iter()
            .flat_map(|&(l, r)| [l, r, l - width, r - width])
            .map(|start| self.measure_in(start, start + width))
            .fold(0.0, f64::max)
    }

    /// Component containing `x`, if any.
    pub fn component_containing(&self, x: f64) -> Option<(f64, f64)> {
        self.intervals.iter().copied().find(|&(l, r)| l < x && x < r)
    }

    /// Closed hull `[min left, max right]`.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }
}

impl TryFrom<Vec<[f64; 2]>> for IntervalSet {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        let sorted = v.windows(2).all(|w| w[0][1] < w[1][0]);
        if !sorted {
            return Err(Error::InvalidInterval {
                left: f64::NAN,
                right: f64::NAN,
                reason: "serialized intervals must be sorted and strictly increasing",
            });
        }
        Self::new(v.into_iter().map(|[l, r]| (l, r)).collect())
    }
}

impl From<IntervalSet> for Vec<[f64; 2]> {
    fn from(s: IntervalSet) -> Self {
        s.intervals.into_iter().map(|(l, r)| [l, r]).collect()
    }
}
