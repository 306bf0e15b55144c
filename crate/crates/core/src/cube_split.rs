//! Cube-splitting: the partition of the grid into vertical equivalence
//! classes, each order-isomorphic to a binary cube.
//!
//! A cell is kept in compact form (its anchor vertex plus the positions and
//! values of the coordinates that differ from `m/2`). Members are produced
//! on demand by [`CubeCell::from_cube`]; the `2^τ` points are never stored.
//!
//! Positions are 0-based coordinate indices. Bit `j` of a [`BitVertex`]
//! corresponds to `positions[j]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BoxIter, GridParams, GridPoint};

/// Largest supported cube dimension for a packed [`BitVertex`].
pub const MAX_BITS: usize = 64;

/// A vertex of the binary cube `E^k`, packed into a machine word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVertex {
    bits: u64,
    len: u8,
}

impl BitVertex {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::Capacity(format!(
                "cube dimension {len} exceeds {MAX_BITS}"
            )));
        }
        if len < MAX_BITS && bits >> len != 0 {
            return Err(Error::InvalidInput(format!(
                "bits {bits:#b} do not fit in {len} positions"
            )));
        }
        Ok(Self {
            bits,
            len: len as u8,
        })
    }

    /// Internal constructor for callers that already validated `len`.
    #[inline]
    pub(crate) fn raw(bits: u64, len: usize) -> Self {
        debug_assert!(len <= MAX_BITS);
        Self {
            bits,
            len: len as u8,
        }
    }

    /// Builds `(β_1, …, β_k)` from a slice of 0/1 values.
    pub fn from_slice(bits: &[u8]) -> Result<Self> {
        let mut word = 0u64;
        for (j, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 if j < MAX_BITS => word |= 1 << j,
                1 => {
                    return Err(Error::Capacity(format!(
                        "cube dimension {} exceeds {MAX_BITS}",
                        bits.len()
                    )))
                }
                _ => return Err(Error::InvalidInput(format!("bit value {b} is not 0 or 1"))),
            }
        }
        Self::new(word, bits.len())
    }

    pub fn zeros(len: usize) -> Self {
        Self::raw(0, len)
    }

    pub fn ones(len: usize) -> Self {
        Self::raw(full_mask(len), len)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, j: usize) -> bool {
        self.bits >> j & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Bitwise `self <= other`.
    pub fn leq(&self, other: &BitVertex) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn complement(&self) -> Self {
        Self::raw(!self.bits & full_mask(self.len()), self.len())
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.len()).map(|j| u8::from(self.get(j))).collect()
    }
}

pub(crate) fn full_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Display for BitVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for j in 0..self.len() {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for BitVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Which homogeneous vertex the bit encoding of a cell is anchored to.
///
/// `Upper`: bit `j` is 1 iff the coordinate is above `m/2`; the upper
/// homogeneous vertex encodes as all-ones. `Lower`: bit `j` is 1 iff the
/// coordinate is below `m/2`; the lower homogeneous vertex encodes as
/// all-ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    Upper,
    Lower,
}

/// A vertical equivalence class in compact form.
#[derive(Debug, Clone)]
pub struct CubeCell {
    params: GridParams,
    rep: GridPoint,
    positions: Vec<usize>,
    values: Vec<u32>,
    anchor: Anchor,
}

/// Cells compare by member set; the anchor does not participate.
impl PartialEq for CubeCell {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.upper_rep() == other.upper_rep()
    }
}

impl Eq for CubeCell {}

impl CubeCell {
    /// Compact cell of a homogeneous vertex. `rep` must lie in the upper
    /// area for [`Anchor::Upper`] and in the lower area for [`Anchor::Lower`].
    pub fn of(rep: GridPoint, params: GridParams, anchor: Anchor) -> Result<Self> {
        params.check(&rep)?;
        let homogeneous = match anchor {
            Anchor::Upper => params.is_upper_homogeneous(&rep),
            Anchor::Lower => params.is_lower_homogeneous(&rep),
        };
        if !homogeneous {
            return Err(Error::InvalidInput(format!(
                "{rep} is not in the {} homogeneous area of {params}",
                match anchor {
                    Anchor::Upper => "upper",
                    Anchor::Lower => "lower",
                }
            )));
        }
        let (positions, values): (Vec<usize>, Vec<u32>) = rep
            .coords()
            .iter()
            .enumerate()
            .filter(|&(_, &v)| 2 * u64::from(v) != u64::from(params.m()))
            .map(|(i, &v)| (i, v))
            .unzip();
        if positions.len() > MAX_BITS {
            return Err(Error::Capacity(format!(
                "cell dimension {} exceeds {MAX_BITS}",
                positions.len()
            )));
        }
        Ok(Self {
            params,
            rep,
            positions,
            values,
            anchor,
        })
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    /// The anchor vertex this cell was built from.
    pub fn rep(&self) -> &GridPoint {
        &self.rep
    }

    pub fn anchor(&self) -> Anchor {
        self.anchor
    }

    /// `τ`, the induced cube dimension.
    pub fn tau(&self) -> usize {
        self.positions.len()
    }

    /// Coordinate indices (0-based, increasing) where the anchor differs from `m/2`.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// The anchor's values at [`Self::positions`].
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// `2^τ`
    pub fn size(&self) -> u128 {
        1u128 << self.tau()
    }

    /// The unique upper homogeneous member; the maximum of the cell.
    pub fn upper_rep(&self) -> GridPoint {
        match self.anchor {
            Anchor::Upper => self.rep.clone(),
            Anchor::Lower => self.reflected_rep(),
        }
    }

    /// The unique lower homogeneous member; the minimum of the cell.
    pub fn lower_rep(&self) -> GridPoint {
        match self.anchor {
            Anchor::Lower => self.rep.clone(),
            Anchor::Upper => self.reflected_rep(),
        }
    }

    fn reflected_rep(&self) -> GridPoint {
        GridPoint::new(
            self.rep
                .coords()
                .iter()
                .map(|&v| self.params.complement(v))
                .collect(),
        )
    }

    /// The same cell with the other encoding.
    pub fn with_anchor(&self, anchor: Anchor) -> CubeCell {
        if anchor == self.anchor {
            return self.clone();
        }
        let rep = match anchor {
            Anchor::Upper => self.upper_rep(),
            Anchor::Lower => self.lower_rep(),
        };
        let values = self.positions.iter().map(|&i| rep.coords()[i]).collect();
        CubeCell {
            params: self.params,
            rep,
            positions: self.positions.clone(),
            values,
            anchor,
        }
    }

    /// Membership without decoding.
    pub fn contains(&self, a: &GridPoint) -> bool {
        if a.dim() != self.params.n() {
            return false;
        }
        let mut next = 0;
        a.coords().iter().enumerate().all(|(i, &v)| {
            if self.positions.get(next) == Some(&i) {
                let w = self.values[next];
                next += 1;
                v == w || v == self.params.complement(w)
            } else {
                2 * u64::from(v) == u64::from(self.params.m())
            }
        })
    }

    /// Encodes a member as a vertex of `E^τ`.
    pub fn to_cube(&self, a: &GridPoint) -> Result<BitVertex> {
        self.params.check(a)?;
        if !self.contains(a) {
            return Err(Error::InvalidInput(format!(
                "{a} is not a member of the cell of {}",
                self.rep
            )));
        }
        let m = u64::from(self.params.m());
        let mut bits = 0u64;
        for (j, &i) in self.positions.iter().enumerate() {
            let twice = 2 * u64::from(a.coords()[i]);
            let set = match self.anchor {
                Anchor::Upper => twice > m,
                Anchor::Lower => twice < m,
            };
            if set {
                bits |= 1 << j;
            }
        }
        Ok(BitVertex::raw(bits, self.tau()))
    }

    /// Origin of a cube vertex in the grid (the reverse mapping).
    ///
    /// Coordinate `s_j` is the anchor's value `v_j` when `β_j = 1` and
    /// `m − v_j` otherwise; coordinates outside the positions are `m/2`.
    /// With the lower anchor `v` is the lower homogeneous vertex, so
    /// `β_j = 1` again means "below `m/2`" and this is the exact inverse of
    /// [`Self::to_cube`].
    pub fn from_cube(&self, b: &BitVertex) -> Result<GridPoint> {
        if b.len() != self.tau() {
            return Err(Error::DimensionMismatch {
                expected: self.tau(),
                actual: b.len(),
            });
        }
        Ok(self.decode(b.bits()))
    }

    /// `from_cube` on a raw bit word; the caller guarantees the length.
    pub(crate) fn decode(&self, bits: u64) -> GridPoint {
        let m = self.params.m();
        let mut coords = vec![m / 2; self.params.n()];
        for (j, (&i, &v)) in self.positions.iter().zip(&self.values).enumerate() {
            // the anchor vertex encodes as all-ones under either anchor
            coords[i] = if bits >> j & 1 == 1 { v } else { m - v };
        }
        GridPoint::new(coords)
    }

    /// All `2^τ` members, ordered by the numeric value of their encoding.
    pub fn members(&self) -> impl Iterator<Item = GridPoint> + '_ {
        let count = if self.tau() >= 64 {
            u64::MAX
        } else {
            1u64 << self.tau()
        };
        (0..count).map(move |bits| self.decode(bits))
    }
}

/// The cell of `rep` (alias of [`CubeCell::of`]).
pub fn cell_of(rep: GridPoint, params: GridParams, anchor: Anchor) -> Result<CubeCell> {
    CubeCell::of(rep, params, anchor)
}

/// Members of a cell, materialized.
pub fn enumerate_cell(cell: &CubeCell) -> Vec<GridPoint> {
    cell.members().collect()
}

/// One cell per homogeneous vertex of the chosen side, in lexicographic
/// order of the anchor vertex.
pub fn full_partition(params: GridParams, anchor: Anchor) -> FullPartition {
    let area = match anchor {
        Anchor::Upper => params.upper_homogeneous(),
        Anchor::Lower => params.lower_homogeneous(),
    };
    FullPartition {
        params,
        anchor,
        area,
    }
}

pub struct FullPartition {
    params: GridParams,
    anchor: Anchor,
    area: BoxIter,
}

impl Iterator for FullPartition {
    type Item = CubeCell;

    fn next(&mut self) -> Option<CubeCell> {
        let rep = self.area.next()?;
        // every point of the area is homogeneous by construction
        Some(CubeCell::of(rep, self.params, self.anchor).expect("homogeneous vertex"))
    }
}

/// Cells for the given anchor vertices only, in lexicographic order.
/// Duplicate vertices yield one cell.
pub fn partial_partition<I>(reps: I, params: GridParams, anchor: Anchor) -> Result<Vec<CubeCell>>
where
    I: IntoIterator<Item = GridPoint>,
{
    let reps: BTreeSet<GridPoint> = reps.into_iter().collect();
    reps.into_iter()
        .map(|rep| CubeCell::of(rep, params, anchor))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p<const N: usize>(c: [u32; N]) -> GridPoint {
        GridPoint::from(c)
    }

    fn g(n: usize, m: u32) -> GridParams {
        GridParams::new(n, m).unwrap()
    }

    fn bv(bits: &[u8]) -> BitVertex {
        BitVertex::from_slice(bits).unwrap()
    }

    #[test]
    fn cell_of_examples() {
        let c = cell_of(p([2, 3, 4]), g(3, 4), Anchor::Upper).unwrap();
        assert_eq!(c.tau(), 2);
        // coordinates 2 and 3 in 1-based numbering
        assert_eq!(c.positions(), &[1, 2]);
        assert_eq!(c.values(), &[3, 4]);

        let c = cell_of(p([2, 2, 2]), g(3, 4), Anchor::Upper).unwrap();
        assert_eq!(c.tau(), 0);
        assert!(c.positions().is_empty() && c.values().is_empty());

        let c = cell_of(p([3, 4, 3]), g(3, 4), Anchor::Upper).unwrap();
        assert_eq!(c.tau(), 3);
        assert_eq!(c.positions(), &[0, 1, 2]);
        assert_eq!(c.values(), &[3, 4, 3]);
        assert_eq!(enumerate_cell(&c).len(), 8);
    }

    #[test]
    fn cell_of_rejects_wrong_area() {
        assert!(matches!(
            cell_of(p([1, 3, 4]), g(3, 4), Anchor::Upper),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cell_of(p([3, 0, 0]), g(3, 4), Anchor::Lower),
            Err(Error::InvalidInput(_))
        ));
        assert!(cell_of(p([1, 0, 1]), g(3, 4), Anchor::Lower).is_ok());
    }

    #[test]
    fn enumerate_examples() {
        let c = cell_of(p([2, 3, 4]), g(3, 4), Anchor::Upper).unwrap();
        let mut members = enumerate_cell(&c);
        members.sort();
        assert_eq!(
            members,
            vec![p([2, 1, 0]), p([2, 1, 4]), p([2, 3, 0]), p([2, 3, 4])]
        );

        let c = cell_of(p([2, 2, 2]), g(3, 4), Anchor::Upper).unwrap();
        assert_eq!(enumerate_cell(&c), vec![p([2, 2, 2])]);

        let c = cell_of(p([3, 4, 3]), g(3, 4), Anchor::Upper).unwrap();
        let members = enumerate_cell(&c);
        for q in [p([1, 0, 1]), p([3, 0, 1]), p([3, 4, 1]), p([3, 4, 3])] {
            assert!(members.contains(&q));
        }
        let params = g(3, 4);
        assert_eq!(
            members
                .iter()
                .filter(|a| params.is_upper_homogeneous(a))
                .count(),
            1
        );
        assert_eq!(
            members
                .iter()
                .filter(|a| params.is_lower_homogeneous(a))
                .count(),
            1
        );
    }

    #[test]
    fn to_cube_examples() {
        let c = cell_of(p([2, 3, 4]), g(3, 4), Anchor::Upper).unwrap();
        assert_eq!(c.to_cube(&p([2, 3, 0])).unwrap(), bv(&[1, 0]));
        assert_eq!(c.to_cube(&p([2, 3, 4])).unwrap(), BitVertex::ones(2));
        assert!(c.to_cube(&p([1, 3, 0])).is_err());

        let c = cell_of(p([3, 4, 3]), g(3, 4), Anchor::Upper).unwrap();
        assert_eq!(c.to_cube(&p([1, 0, 1])).unwrap(), bv(&[0, 0, 0]));
    }

    #[test]
    fn from_cube_examples() {
        let c = cell_of(p([2, 3, 4]), g(3, 4), Anchor::Upper).unwrap();
        assert_eq!(c.from_cube(&bv(&[1, 0])).unwrap(), p([2, 3, 0]));
        assert_eq!(c.from_cube(&bv(&[0, 0])).unwrap(), c.lower_rep());
        assert!(matches!(
            c.from_cube(&bv(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));

        let c = cell_of(p([3, 4, 3]), g(3, 4), Anchor::Upper).unwrap();
        assert_eq!(c.from_cube(&bv(&[1, 1, 0])).unwrap(), p([3, 4, 1]));
    }

    #[test]
    fn induced_chain_transfers_to_origin_chain() {
        let c = cell_of(p([3, 4, 3]), g(3, 4), Anchor::Upper).unwrap();
        let chain = [
            bv(&[0, 0, 0]),
            bv(&[1, 0, 0]),
            bv(&[1, 1, 0]),
            bv(&[1, 1, 1]),
        ];
        let origin: Vec<_> = chain.iter().map(|b| c.from_cube(b).unwrap()).collect();
        assert_eq!(
            origin,
            vec![p([1, 0, 1]), p([3, 0, 1]), p([3, 4, 1]), p([3, 4, 3])]
        );
    }

    #[test]
    fn lower_anchor_uses_dual_mapping() {
        let params = g(3, 4);
        let c = cell_of(p([1, 0, 1]), params, Anchor::Lower).unwrap();
        assert_eq!(c.upper_rep(), p([3, 4, 3]));
        assert_eq!(c.to_cube(&p([1, 0, 1])).unwrap(), BitVertex::ones(3));
        assert_eq!(c.to_cube(&p([3, 4, 3])).unwrap(), BitVertex::zeros(3));
        assert_eq!(c.from_cube(&bv(&[0, 1, 1])).unwrap(), p([3, 0, 1]));
        let upper = cell_of(p([3, 4, 3]), params, Anchor::Upper).unwrap();
        assert_eq!(c, upper);
        assert_eq!(upper.with_anchor(Anchor::Lower).rep(), &p([1, 0, 1]));
    }

    #[test]
    fn full_partition_examples() {
        let cells: Vec<_> = full_partition(g(3, 4), Anchor::Upper).collect();
        assert_eq!(cells.len(), 27);
        let mut hist = [0usize; 4];
        for c in &cells {
            hist[c.tau()] += 1;
        }
        assert_eq!(hist, [1, 6, 12, 8]);
        assert_eq!(cells.iter().map(|c| c.size()).sum::<u128>(), 125);

        let cells: Vec<_> = full_partition(g(2, 1), Anchor::Upper).collect();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].size(), 4);

        let cells: Vec<_> = full_partition(g(1, 2), Anchor::Upper).collect();
        assert_eq!(enumerate_cell(&cells[0]), vec![p([1])]);
        let mut second = enumerate_cell(&cells[1]);
        second.sort();
        assert_eq!(second, vec![p([0]), p([2])]);
    }

    #[test]
    fn partial_partition_examples() {
        let params = g(3, 4);
        let cells = partial_partition([p([3, 4, 3])], params, Anchor::Upper).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].size(), 8);

        assert!(partial_partition(Vec::new(), params, Anchor::Upper)
            .unwrap()
            .is_empty());

        let cells = partial_partition([p([2, 3, 4]), p([4, 2, 2])], params, Anchor::Upper).unwrap();
        assert_eq!(
            cells.iter().map(|c| c.size()).collect::<Vec<_>>(),
            vec![4, 2]
        );
        let a: BTreeSet<_> = enumerate_cell(&cells[0]).into_iter().collect();
        let b: BTreeSet<_> = enumerate_cell(&cells[1]).into_iter().collect();
        assert!(a.is_disjoint(&b));

        assert!(partial_partition([p([1, 4, 3])], params, Anchor::Upper).is_err());
    }

    #[test]
    fn partition_properties_exhaustive() {
        for n in 1..=3 {
            for m in 1..=5 {
                let params = g(n, m);
                for anchor in [Anchor::Upper, Anchor::Lower] {
                    let mut seen = vec![false; params.point_count().unwrap() as usize];
                    let mut cells = 0;
                    for cell in full_partition(params, anchor) {
                        cells += 1;
                        if m % 2 == 1 {
                            assert_eq!(cell.tau(), n);
                        }
                        let members: Vec<_> = cell.members().collect();
                        for (code, a) in members.iter().enumerate() {
                            let idx = params.index_of(a);
                            assert!(!seen[idx], "{a} covered twice");
                            seen[idx] = true;
                            let b = cell.to_cube(a).unwrap();
                            assert_eq!(b.bits(), code as u64);
                            assert_eq!(&cell.from_cube(&b).unwrap(), a);
                            // layer correspondence
                            let on_side = a
                                .coords()
                                .iter()
                                .filter(|&&v| match anchor {
                                    Anchor::Upper => 2 * v > m,
                                    Anchor::Lower => 2 * v < m,
                                })
                                .count();
                            assert_eq!(b.weight() as usize, on_side);
                            // anchor duality
                            let dual = cell.with_anchor(match anchor {
                                Anchor::Upper => Anchor::Lower,
                                Anchor::Lower => Anchor::Upper,
                            });
                            assert_eq!(dual.to_cube(a).unwrap(), b.complement());
                        }
                        for a in &members {
                            for c in &members {
                                let grid = a.below(c);
                                let ba = cell.to_cube(a).unwrap();
                                let bc = cell.to_cube(c).unwrap();
                                match anchor {
                                    Anchor::Upper => assert_eq!(grid, ba.leq(&bc)),
                                    Anchor::Lower => assert_eq!(grid, bc.leq(&ba)),
                                }
                            }
                        }
                    }
                    assert!(seen.iter().all(|&s| s));
                    assert_eq!(cells as u64, params.homogeneous_count().unwrap());
                }
            }
        }
    }

    #[test]
    fn bit_vertex_validation() {
        assert!(BitVertex::new(0b100, 2).is_err());
        assert!(BitVertex::from_slice(&[0, 2]).is_err());
        assert_eq!(bv(&[1, 0, 1]).to_string(), "(101)");
        assert_eq!(bv(&[1, 0, 1]).complement(), bv(&[0, 1, 0]));
        assert!(BitVertex::zeros(0).is_empty());
    }
}
