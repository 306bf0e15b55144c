//! Hansel chain decomposition of `E^k` and chain-driven recognition of a
//! monotone Boolean function by membership queries.

use crate::cube_split::{full_mask, BitVertex};
use crate::error::{Error, Result};

/// Largest cube dimension [`decompose`] accepts.
pub const K_MAX: usize = 24;

/// A saturated chain: each vertex adds exactly one bit to its predecessor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    vertices: Vec<BitVertex>,
}

impl Chain {
    pub fn vertices(&self) -> &[BitVertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Weight of the bottom vertex.
    pub fn start_weight(&self) -> u32 {
        self.vertices[0].weight()
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// `C(k,⌊k/2⌋) + C(k,⌊k/2⌋+1)`, the worst-case query count on `E^k`.
pub fn hansel_bound(k: usize) -> u128 {
    let k = k as u64;
    binomial(k, k / 2) + binomial(k, k / 2 + 1)
}

/// Hansel chains of `E^k`, ordered by increasing length (ties keep
/// construction order).
///
/// Built recursively: a chain `⟨a_1,…,a_l⟩` of `E^{k-1}` yields
/// `⟨a_1·0,…,a_l·0, a_l·1⟩` and, when `l > 1`, `⟨a_1·1,…,a_{l-1}·1⟩`, where
/// the appended bit is coordinate `k-1`.
pub fn decompose(k: usize) -> Result<Vec<Chain>> {
    if k > K_MAX {
        return Err(Error::Capacity(format!(
            "cube dimension {k} exceeds {K_MAX}"
        )));
    }
    let mut chains: Vec<Vec<u64>> = vec![vec![0]];
    for bit in 0..k {
        let high = 1u64 << bit;
        let mut next = Vec::with_capacity(chains.len() * 2);
        for chain in chains {
            let last = *chain.last().expect("chains are non-empty");
            if chain.len() > 1 {
                next.push(chain[..chain.len() - 1].iter().map(|&v| v | high).collect());
            }
            let mut extended = chain;
            extended.push(last | high);
            next.push(extended);
        }
        chains = next;
    }
    chains.sort_by_key(Vec::len);
    Ok(chains
        .into_iter()
        .map(|c| Chain {
            vertices: c.into_iter().map(|v| BitVertex::raw(v, k)).collect(),
        })
        .collect())
}

const UNKNOWN: u8 = 0;
const ZERO: u8 = 1;
const ONE: u8 = 2;

/// Values known on `E^k`, kept closed under monotone inference.
///
/// Every known vertex remembers the vertex whose value forced it so a
/// conflict can be reported as a concrete violating pair.
struct Knowledge {
    k: usize,
    state: Vec<u8>,
    source: Vec<u64>,
}

impl Knowledge {
    fn new(k: usize) -> Self {
        let size = 1usize << k;
        Self {
            k,
            state: vec![UNKNOWN; size],
            source: vec![0; size],
        }
    }

    fn get(&self, v: u64) -> Option<bool> {
        match self.state[v as usize] {
            ZERO => Some(false),
            ONE => Some(true),
            _ => None,
        }
    }

    /// Records `f(v) = value` and propagates it (upward for 1, downward for 0).
    fn assign(&mut self, v: u64, value: bool) -> Result<()> {
        let (mark, opposite) = if value { (ONE, ZERO) } else { (ZERO, ONE) };
        match self.state[v as usize] {
            s if s == mark => return Ok(()),
            s if s == opposite => return Err(self.conflict(v, v, value)),
            _ => {}
        }
        self.state[v as usize] = mark;
        self.source[v as usize] = v;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for j in 0..self.k {
                let bit = 1u64 << j;
                let y = if value {
                    if x & bit != 0 {
                        continue;
                    }
                    x | bit
                } else {
                    if x & bit == 0 {
                        continue;
                    }
                    x & !bit
                };
                let s = self.state[y as usize];
                if s == mark {
                    // closure invariant: everything beyond y is already marked
                    continue;
                }
                if s == opposite {
                    return Err(self.conflict(v, y, value));
                }
                self.state[y as usize] = mark;
                self.source[y as usize] = v;
                stack.push(y);
            }
        }
        Ok(())
    }

    fn conflict(&self, origin: u64, clash: u64, value: bool) -> Error {
        let other = self.source[clash as usize];
        let (unit, zero) = if value {
            (origin, other)
        } else {
            (other, origin)
        };
        Error::CubeContradiction {
            unit: BitVertex::raw(unit, self.k),
            zero: BitVertex::raw(zero, self.k),
        }
    }
}

/// A partial assignment on `E^k`; `None` marks an unknown vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    k: usize,
    values: Vec<Option<bool>>,
}

impl PartialAssignment {
    pub fn new(k: usize) -> Result<Self> {
        if k > K_MAX {
            return Err(Error::Capacity(format!(
                "cube dimension {k} exceeds {K_MAX}"
            )));
        }
        Ok(Self {
            k,
            values: vec![None; 1 << k],
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, v: &BitVertex) -> Option<bool> {
        self.values[v.bits() as usize]
    }

    pub fn set(&mut self, v: &BitVertex, value: bool) -> Result<()> {
        if v.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                actual: v.len(),
            });
        }
        self.values[v.bits() as usize] = Some(value);
        Ok(())
    }

    pub fn known_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// Extends `known` with every value forced by monotonicity.
pub fn infer_closure(known: &PartialAssignment) -> Result<PartialAssignment> {
    let mut kb = Knowledge::new(known.k);
    for (v, value) in known.values.iter().enumerate() {
        if let Some(value) = value {
            kb.assign(v as u64, *value)?;
        }
    }
    Ok(PartialAssignment {
        k: known.k,
        values: (0..kb.state.len() as u64).map(|v| kb.get(v)).collect(),
    })
}

/// A fully determined monotone function on `E^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeAssignment {
    k: usize,
    values: Vec<bool>,
    min_units: Vec<BitVertex>,
    max_zeros: Vec<BitVertex>,
    transcript: Vec<(BitVertex, bool)>,
}

impl CubeAssignment {
    /// Builds an assignment from a complete truth table indexed by the
    /// numeric value of the vertex. Monotonicity is checked.
    pub fn from_values(k: usize, values: Vec<bool>) -> Result<Self> {
        if values.len() != 1usize << k {
            return Err(Error::InvalidInput(format!(
                "truth table has {} entries, expected {}",
                values.len(),
                1usize << k
            )));
        }
        for v in 0..values.len() {
            if !values[v] {
                continue;
            }
            for j in 0..k {
                let w = v | 1 << j;
                if !values[w] {
                    return Err(Error::CubeContradiction {
                        unit: BitVertex::raw(v as u64, k),
                        zero: BitVertex::raw(w as u64, k),
                    });
                }
            }
        }
        Ok(Self::build(k, values, Vec::new()))
    }

    fn build(k: usize, values: Vec<bool>, transcript: Vec<(BitVertex, bool)>) -> Self {
        let mut min_units = Vec::new();
        let mut max_zeros = Vec::new();
        for v in 0..values.len() {
            let below_all_zero = (0..k).all(|j| v >> j & 1 == 0 || !values[v & !(1 << j)]);
            let above_all_one = (0..k).all(|j| v >> j & 1 == 1 || values[v | 1 << j]);
            if values[v] && below_all_zero {
                min_units.push(BitVertex::raw(v as u64, k));
            }
            if !values[v] && above_all_one {
                max_zeros.push(BitVertex::raw(v as u64, k));
            }
        }
        Self {
            k,
            values,
            min_units,
            max_zeros,
            transcript,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn value(&self, v: &BitVertex) -> bool {
        self.values[v.bits() as usize]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Minimal 1-vertices, an antichain.
    pub fn min_units(&self) -> &[BitVertex] {
        &self.min_units
    }

    /// Maximal 0-vertices, an antichain.
    pub fn max_zeros(&self) -> &[BitVertex] {
        &self.max_zeros
    }

    /// Queries issued during recognition, in order, with their answers.
    pub fn transcript(&self) -> &[(BitVertex, bool)] {
        &self.transcript
    }

    pub fn query_count(&self) -> usize {
        self.transcript.len()
    }
}

/// Recognizes a monotone function on `E^k` with at most [`hansel_bound`]
/// calls to `query`.
pub fn recognize_cube<Q>(k: usize, query: Q) -> Result<CubeAssignment>
where
    Q: FnMut(BitVertex) -> bool,
{
    let chains = decompose(k)?;
    recognize_with_chains(k, &chains, query)
}

/// [`recognize_cube`] with a precomputed decomposition of `E^k` (as
/// returned by [`decompose`], shortest chains first).
///
/// Chains are handled in order. On each chain the values form a step
/// function, so the unknown vertices are a contiguous segment between the
/// known zeros below and known ones above; the segment is resolved by
/// bisection. A vertex is only queried while its value is not inferable.
pub fn recognize_with_chains<Q>(k: usize, chains: &[Chain], mut query: Q) -> Result<CubeAssignment>
where
    Q: FnMut(BitVertex) -> bool,
{
    if k > K_MAX {
        return Err(Error::Capacity(format!(
            "cube dimension {k} exceeds {K_MAX}"
        )));
    }
    let mut kb = Knowledge::new(k);
    let mut transcript = Vec::new();
    for chain in chains {
        let verts = chain.vertices();
        // first unknown from the bottom and last unknown from the top
        while let Some(lo) = verts.iter().position(|v| kb.get(v.bits()).is_none()) {
            let hi = verts
                .iter()
                .rposition(|v| kb.get(v.bits()).is_none())
                .expect("lo exists");
            let mid = verts[lo + (hi - lo) / 2];
            let answer = query(mid);
            transcript.push((mid, answer));
            kb.assign(mid.bits(), answer)?;
        }
    }
    let values: Vec<bool> = kb.state.iter().map(|&s| s == ONE).collect();
    if kb.state.contains(&UNKNOWN) {
        return Err(Error::Inconsistent("chains do not cover the cube".into()));
    }
    debug_assert_eq!(values.len(), full_mask(k) as usize + 1);
    Ok(CubeAssignment::build(k, values, transcript))
}
