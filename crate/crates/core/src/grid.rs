//! The multi-valued grid `{0..=m}^n` under the componentwise order.
//!
//! All comparisons against the midpoint `m/2` are done on doubled values
//! (`2·a` against `m`) so odd `m` never goes through a rounding step.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the grid: `n` coordinates, each ranging over `0..=m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridParams {
    n: usize,
    m: u32,
}

impl GridParams {
    pub fn new(n: usize, m: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension n must be at least 1".into()));
        }
        if m == 0 {
            return Err(Error::InvalidInput(
                "maximum value m must be at least 1".into(),
            ));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `(m+1)^n`, or `None` on overflow.
    pub fn point_count(&self) -> Option<u64> {
        u64::from(self.m + 1).checked_pow(u32::try_from(self.n).ok()?)
    }

    /// The midpoint `m/2` when it is itself a coordinate value (even `m`).
    pub fn midpoint(&self) -> Option<u32> {
        self.m.is_multiple_of(2).then_some(self.m / 2)
    }

    /// `v >= m/2`
    #[inline]
    pub fn is_upper_value(&self, v: u32) -> bool {
        2 * u64::from(v) >= u64::from(self.m)
    }

    /// `v <= m/2`
    #[inline]
    pub fn is_lower_value(&self, v: u32) -> bool {
        2 * u64::from(v) <= u64::from(self.m)
    }

    /// `m - v`, the reflection of a coordinate value through `m/2`.
    #[inline]
    pub fn complement(&self, v: u32) -> u32 {
        self.m - v
    }

    pub fn check(&self, a: &GridPoint) -> Result<()> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: a.dim(),
            });
        }
        if let Some(&v) = a.coords().iter().find(|&&v| v > self.m) {
            return Err(Error::InvalidInput(format!(
                "coordinate {v} of {a} exceeds m = {}",
                self.m
            )));
        }
        Ok(())
    }

    /// Every point, in lexicographic order.
    pub fn points(&self) -> BoxIter {
        BoxIter::new(vec![0; self.n], vec![self.m; self.n])
    }

    /// Position of `a` in the lexicographic enumeration (mixed radix, first
    /// coordinate most significant).
    pub fn index_of(&self, a: &GridPoint) -> usize {
        let radix = self.m as usize + 1;
        a.coords()
            .iter()
            .fold(0usize, |acc, &v| acc * radix + v as usize)
    }

    pub fn point_at(&self, mut index: usize) -> GridPoint {
        let radix = self.m as usize + 1;
        let mut coords = vec![0u32; self.n];
        for c in coords.iter_mut().rev() {
            *c = (index % radix) as u32;
            index /= radix;
        }
        GridPoint::new(coords)
    }

    pub fn top(&self) -> GridPoint {
        GridPoint::new(vec![self.m; self.n])
    }

    pub fn bottom(&self) -> GridPoint {
        GridPoint::new(vec![0; self.n])
    }

    /// Smallest coordinate value `>= m/2`.
    pub fn upper_start(&self) -> u32 {
        self.m.div_ceil(2)
    }

    /// Largest coordinate value `<= m/2`.
    pub fn lower_end(&self) -> u32 {
        self.m / 2
    }

    /// The upper homogeneous area: points with every coordinate `>= m/2`,
    /// lexicographically ordered.
    pub fn upper_homogeneous(&self) -> BoxIter {
        BoxIter::new(vec![self.upper_start(); self.n], vec![self.m; self.n])
    }

    /// The lower homogeneous area: points with every coordinate `<= m/2`.
    pub fn lower_homogeneous(&self) -> BoxIter {
        BoxIter::new(vec![0; self.n], vec![self.lower_end(); self.n])
    }

    pub fn is_upper_homogeneous(&self, a: &GridPoint) -> bool {
        a.coords().iter().all(|&v| self.is_upper_value(v))
    }

    pub fn is_lower_homogeneous(&self, a: &GridPoint) -> bool {
        a.coords().iter().all(|&v| self.is_lower_value(v))
    }

    /// Closed form for `|Ĥ| = |Ȟ|`: `((m+1)/2)^n` for odd `m`, `(m/2+1)^n`
    /// for even `m`.
    pub fn homogeneous_count(&self) -> Option<u64> {
        let side = u64::from(self.m - self.upper_start() + 1);
        side.checked_pow(u32::try_from(self.n).ok()?)
    }

    /// Number of points on each layer `Σ a_i = s`, for `s` in `0..=m·n`.
    ///
    /// Computed as the coefficients of `(1 + x + … + x^m)^n`, never by
    /// enumerating the grid.
    pub fn layer_counts(&self) -> Vec<u128> {
        layer_counts(self.n, self.m)
    }

    pub fn middle_layer_stats(&self) -> MiddleLayerStats {
        MiddleLayerStats::from_layers(&self.layer_counts(), self.n, self.m, floor_log2(self.m))
    }

    /// Middle layers of the upper homogeneous area and the matching query
    /// bound `|M_1| + ⌈log₂⌈m/2⌉⌉·|N_1|`.
    pub fn upper_area_stats(&self) -> MiddleLayerStats {
        let inner_m = self.m - self.upper_start();
        let layers = layer_counts(self.n, inner_m);
        MiddleLayerStats::from_layers(&layers, self.n, inner_m, ceil_log2(self.m.div_ceil(2)))
    }
}

impl fmt::Display for GridParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E_{}^{}", self.m + 1, self.n)
    }
}

/// The two middle layers `M`, `N` of a uniform grid and the middle-layer
/// query bound `|M| + log_factor·|N|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiddleLayerStats {
    pub middle: u128,
    pub next: u128,
    pub log_factor: u32,
    pub bound: u128,
}

impl MiddleLayerStats {
    fn from_layers(layers: &[u128], n: usize, m: u32, log_factor: u32) -> Self {
        let mid = (m as usize * n) / 2;
        let middle = layers.get(mid).copied().unwrap_or(0);
        let next = layers.get(mid + 1).copied().unwrap_or(0);
        Self {
            middle,
            next,
            log_factor,
            bound: middle + u128::from(log_factor) * next,
        }
    }

    /// `|M| + |N|`, the lower bound for any recognizer.
    pub fn optimal_floor(&self) -> u128 {
        self.middle + self.next
    }
}

fn layer_counts(n: usize, m: u32) -> Vec<u128> {
    let m = m as usize;
    let mut counts = vec![1u128];
    for _ in 0..n {
        let mut next = vec![0u128; counts.len() + m];
        // sliding window sum over the previous row
        let mut window = 0u128;
        for (s, slot) in next.iter_mut().enumerate() {
            if s < counts.len() {
                window += counts[s];
            }
            if s > m && s - m - 1 < counts.len() {
                window -= counts[s - m - 1];
            }
            *slot = window;
        }
        counts = next;
    }
    counts
}

pub(crate) fn floor_log2(x: u32) -> u32 {
    if x == 0 {
        0
    } else {
        31 - x.leading_zeros()
    }
}

pub(crate) fn ceil_log2(x: u32) -> u32 {
    if x <= 1 {
        0
    } else {
        32 - (x - 1).leading_zeros()
    }
}

/// A vertex of the grid.
///
/// Ordering is lexicographic on coordinates (the first coordinate decides
/// first), which is the canonical order used for every sorted output.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridPoint(Vec<u32>);

impl GridPoint {
    pub fn new(coords: Vec<u32>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &GridPoint) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.below(other))
    }

    /// Unchecked `self <= other`; callers guarantee equal dimensions.
    #[inline]
    pub(crate) fn below(&self, other: &GridPoint) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn layer_sum(&self) -> u64 {
        self.0.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.0
    }
}

impl From<Vec<u32>> for GridPoint {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for GridPoint {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Lexicographic odometer over the box `lo ..= hi` (componentwise).
#[derive(Debug, Clone)]
pub struct BoxIter {
    lo: Vec<u32>,
    hi: Vec<u32>,
    next: Option<Vec<u32>>,
}

impl BoxIter {
    pub fn new(lo: Vec<u32>, hi: Vec<u32>) -> Self {
        assert_eq!(lo.len(), hi.len());
        let empty = lo.iter().zip(&hi).any(|(l, h)| l > h);
        let next = (!empty).then(|| lo.clone());
        Self { lo, hi, next }
    }
}

impl Iterator for BoxIter {
    type Item = GridPoint;

    fn next(&mut self) -> Option<GridPoint> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        while i > 0 {
            i -= 1;
            if succ[i] < self.hi[i] {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = self.lo[i];
        }
        Some(GridPoint(current))
    }
}

/// Minimal elements of `points` (duplicates collapsed), sorted
/// lexicographically.
pub fn minimal_elements<I: IntoIterator<Item = GridPoint>>(points: I) -> Vec<GridPoint> {
    let mut pts: Vec<GridPoint> = points.into_iter().collect();
    pts.sort_by(|a, b| a.layer_sum().cmp(&b.layer_sum()).then_with(|| a.cmp(b)));
    pts.dedup();
    let mut kept: Vec<GridPoint> = Vec::new();
    for p in pts {
        if !kept.iter().any(|k| k.below(&p)) {
            kept.push(p);
        }
    }
    kept.sort();
    kept
}

/// Maximal elements of `points`, sorted lexicographically.
pub fn maximal_elements<I: IntoIterator<Item = GridPoint>>(points: I) -> Vec<GridPoint> {
    let mut pts: Vec<GridPoint> = points.into_iter().collect();
    pts.sort_by(|a, b| b.layer_sum().cmp(&a.layer_sum()).then_with(|| a.cmp(b)));
    pts.dedup();
    let mut kept: Vec<GridPoint> = Vec::new();
    for p in pts {
        if !kept.iter().any(|k| p.below(k)) {
            kept.push(p);
        }
    }
    kept.sort();
    kept
}

pub fn is_antichain(points: &[GridPoint]) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, a)| points[i + 1..].iter().all(|b| !a.below(b) && !b.below(a)))
}
