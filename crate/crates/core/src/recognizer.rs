//! Grid-level recognition by cube-splitting.
//!
//! * [`Recognizer::algorithm1`] splits the whole grid into cells anchored at
//!   the upper homogeneous area and recognizes every induced cube function
//!   with Hansel chains.
//! * [`Recognizer::algorithm2`] first identifies `F` on the upper
//!   homogeneous area `Ĥ`, then splits only the cells whose anchor is a unit.
//! * [`Recognizer::recognize_complement`] is the mirror image: it finds the
//!   zeros of `F` in the lower area and recognizes the complement on
//!   lower-anchored cells.
//!
//! Cells are recognized independently; no value inferred in one cell is
//! used by another. The oracle handle memoizes answers, which only matters
//! when the same point is reached by two phases (area identification and
//! cell recognition), never by two cells.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube_split::{full_partition, partial_partition, Anchor, CubeCell};
use crate::error::{Error, Result};
use crate::grid::{is_antichain, maximal_elements, minimal_elements, GridParams, GridPoint};
use crate::hansel::{decompose, hansel_bound, recognize_with_chains, Chain, CubeAssignment};
use crate::oracles::{GridAssignment, Oracle, BRUTE_FORCE_BUDGET};

/// Counting, memoizing wrapper around an [`Oracle`].
///
/// Safe to share between threads. Repeated queries are answered from the
/// cache and do not count.
pub struct OracleHandle<'a> {
    oracle: &'a dyn Oracle,
    count: AtomicU64,
    cache: Mutex<HashMap<GridPoint, bool>>,
}

impl<'a> OracleHandle<'a> {
    pub fn new(oracle: &'a dyn Oracle) -> Self {
        Self {
            oracle,
            count: AtomicU64::new(0),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn query(&self, a: &GridPoint) -> bool {
        if let Some(&v) = self.cache.lock().expect("oracle cache poisoned").get(a) {
            return v;
        }
        let v = self.oracle.query(a);
        self.count.fetch_add(1, Ordering::Relaxed);
        self.cache
            .lock()
            .expect("oracle cache poisoned")
            .insert(a.clone(), v);
        v
    }

    /// Number of calls that reached the wrapped oracle.
    pub fn query_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn is_cached(&self, a: &GridPoint) -> bool {
        self.cache
            .lock()
            .expect("oracle cache poisoned")
            .contains_key(a)
    }

    /// Every answered point, lexicographically sorted.
    pub fn answered(&self) -> Vec<(GridPoint, bool)> {
        let mut out: Vec<_> = self
            .cache
            .lock()
            .expect("oracle cache poisoned")
            .iter()
            .map(|(a, v)| (a.clone(), *v))
            .collect();
        out.sort();
        out
    }
}

impl Oracle for OracleHandle<'_> {
    fn query(&self, a: &GridPoint) -> bool {
        OracleHandle::query(self, a)
    }
}

/// How Algorithm 2 identifies `F` on the upper homogeneous area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AreaResource {
    /// Sweep `Ĥ` from its top layer down, skipping points already implied
    /// by monotonicity.
    AreaBruteForce,
    /// Treat `Ĥ` as a grid of its own and run Algorithm 1 on it.
    TwoLevelSplit,
    /// `Recursive(0)` is [`AreaResource::AreaBruteForce`], `Recursive(1)` is
    /// [`AreaResource::TwoLevelSplit`]; deeper levels run Algorithm 2 on
    /// `Ĥ` with one level less.
    Recursive(u32),
}

impl AreaResource {
    /// Default selection: brute force on small areas, two-level splitting
    /// beyond 4096 points.
    pub fn default_for(params: GridParams) -> Self {
        match params.homogeneous_count() {
            Some(c) if c <= 4096 => AreaResource::AreaBruteForce,
            _ => AreaResource::TwoLevelSplit,
        }
    }

    fn normalized(self) -> Self {
        match self {
            AreaResource::Recursive(0) => AreaResource::AreaBruteForce,
            AreaResource::Recursive(1) => AreaResource::TwoLevelSplit,
            other => other,
        }
    }
}

impl fmt::Display for AreaResource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AreaResource::AreaBruteForce => f.write_str("area-brute"),
            AreaResource::TwoLevelSplit => f.write_str("two-level"),
            AreaResource::Recursive(d) => write!(f, "recursive:{d}"),
        }
    }
}

impl FromStr for AreaResource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "area-brute" => Ok(AreaResource::AreaBruteForce),
            "two-level" => Ok(AreaResource::TwoLevelSplit),
            _ => s
                .strip_prefix("recursive:")
                .and_then(|d| d.parse().ok())
                .map(AreaResource::Recursive)
                .ok_or_else(|| Error::InvalidInput(format!("unknown resource {s:?}"))),
        }
    }
}

/// Which procedure produced a [`RecognitionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmTag {
    Algorithm1,
    Algorithm2(AreaResource),
    Complement(AreaResource),
    BruteForce,
}

impl fmt::Display for AlgorithmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmTag::Algorithm1 => f.write_str("alg1"),
            AlgorithmTag::Algorithm2(r) => write!(f, "alg2[{r}]"),
            AlgorithmTag::Complement(r) => write!(f, "complement[{r}]"),
            AlgorithmTag::BruteForce => f.write_str("brute"),
        }
    }
}

impl Serialize for AlgorithmTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Per-cell accounting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStat {
    pub rep: GridPoint,
    pub anchor: Anchor,
    pub tau: usize,
    /// Queries issued by this cell's chain recognition (cache hits included).
    pub queries: usize,
}

/// Full identification of `F` by its two border antichains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecognitionResult {
    params: GridParams,
    algorithm: AlgorithmTag,
    lower_units: Vec<GridPoint>,
    upper_zeros: Vec<GridPoint>,
    query_count: u64,
    per_cell_stats: Vec<CellStat>,
    split_cells: usize,
    area_queries: u64,
}

impl RecognitionResult {
    pub fn new(
        params: GridParams,
        algorithm: AlgorithmTag,
        mut lower_units: Vec<GridPoint>,
        mut upper_zeros: Vec<GridPoint>,
        query_count: u64,
    ) -> Self {
        lower_units.sort();
        upper_zeros.sort();
        Self {
            params,
            algorithm,
            lower_units,
            upper_zeros,
            query_count,
            per_cell_stats: Vec::new(),
            split_cells: 0,
            area_queries: 0,
        }
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    pub fn algorithm(&self) -> AlgorithmTag {
        self.algorithm
    }

    /// Minimal units, lexicographically sorted.
    pub fn lower_units(&self) -> &[GridPoint] {
        &self.lower_units
    }

    /// Maximal zeros, lexicographically sorted.
    pub fn upper_zeros(&self) -> &[GridPoint] {
        &self.upper_zeros
    }

    /// Oracle calls made by this run.
    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn per_cell_stats(&self) -> &[CellStat] {
        &self.per_cell_stats
    }

    /// Number of cells recognized by chain queries.
    pub fn split_cells(&self) -> usize {
        self.split_cells
    }

    /// Queries spent identifying the homogeneous area (Algorithm 2 and the
    /// complement route only).
    pub fn area_queries(&self) -> u64 {
        self.area_queries
    }

    /// `F(a)`, as determined by the lower units.
    pub fn evaluate(&self, a: &GridPoint) -> bool {
        self.lower_units.iter().any(|u| u.below(a))
    }

    /// `F(a)`, as determined by the upper zeros.
    pub fn evaluate_by_zeros(&self, a: &GridPoint) -> bool {
        !self.upper_zeros.iter().any(|z| a.below(z))
    }

    /// Same identified function (the borders match), ignoring statistics.
    pub fn same_function(&self, other: &RecognitionResult) -> bool {
        self.params == other.params
            && self.lower_units == other.lower_units
            && self.upper_zeros == other.upper_zeros
    }

    /// Antichain checks plus "no upper zero dominates a lower unit".
    pub fn check_invariants(&self) -> Result<()> {
        if !is_antichain(&self.lower_units) {
            return Err(Error::Inconsistent(
                "lower units are not an antichain".into(),
            ));
        }
        if !is_antichain(&self.upper_zeros) {
            return Err(Error::Inconsistent(
                "upper zeros are not an antichain".into(),
            ));
        }
        for u in &self.lower_units {
            if let Some(z) = self.upper_zeros.iter().find(|z| u.below(z)) {
                return Err(Error::Contradiction {
                    unit: u.clone(),
                    zero: z.clone(),
                });
            }
        }
        Ok(())
    }

    /// Checks that both borders describe the same function on every point.
    /// Enumerates the grid, so the brute-force budget applies.
    pub fn check_borders_agree(&self) -> Result<()> {
        let assignment = GridAssignment::evaluate(self.params, &|a: &GridPoint| self.evaluate(a))?;
        for (i, &v) in assignment.values().iter().enumerate() {
            let a = self.params.point_at(i);
            if v != self.evaluate_by_zeros(&a) {
                return Err(Error::Inconsistent(format!("borders disagree at {a}")));
            }
        }
        Ok(())
    }

    /// Every answer the oracle gave must agree with the identified
    /// function; a disagreement is reported with a violating pair.
    pub fn check_against_answers(&self, answers: &[(GridPoint, bool)]) -> Result<()> {
        for (a, v) in answers {
            match (v, self.evaluate(a)) {
                (true, false) => {
                    let zero = self
                        .upper_zeros
                        .iter()
                        .find(|z| a.below(z))
                        .cloned()
                        .unwrap_or_else(|| a.clone());
                    return Err(Error::Contradiction {
                        unit: a.clone(),
                        zero,
                    });
                }
                (false, true) => {
                    let unit = self
                        .lower_units
                        .iter()
                        .find(|u| u.below(a))
                        .cloned()
                        .expect("evaluate found a unit");
                    return Err(Error::Contradiction {
                        unit,
                        zero: a.clone(),
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Units of `F` within the upper homogeneous area, plus the borders of `F`
/// restricted to that area.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AreaIdentification {
    /// `N_F ∩ Ĥ`, lexicographically sorted.
    pub units: Vec<GridPoint>,
    /// Minimal elements of `units`.
    pub min_units: Vec<GridPoint>,
    /// Maximal zeros of `F` inside `Ĥ`.
    pub max_zeros: Vec<GridPoint>,
}

/// Sum of per-cell Hansel bounds over the full partition of the grid.
///
/// Even `m`: `C(n,k)·(m/2)^k` cells have `τ = k`. Odd `m`: all
/// `((m+1)/2)^n` cells have `τ = n`.
pub fn full_partition_query_bound(params: GridParams) -> Option<u128> {
    let n = params.n();
    let m = params.m();
    if m % 2 == 1 {
        let cells = u128::from(m.div_ceil(2)).checked_pow(n as u32)?;
        return cells.checked_mul(hansel_bound(n));
    }
    let side = u128::from(m / 2);
    let mut total = 0u128;
    for k in 0..=n {
        let cells =
            crate::hansel::binomial(n as u64, k as u64).checked_mul(side.checked_pow(k as u32)?)?;
        total = total.checked_add(cells.checked_mul(hansel_bound(k))?)?;
    }
    Some(total)
}

/// Runs the recognition algorithms on one grid.
#[derive(Debug, Clone, Copy)]
pub struct Recognizer {
    params: GridParams,
    workers: usize,
}

impl Recognizer {
    pub fn new(params: GridParams) -> Self {
        Self { params, workers: 1 }
    }

    /// Worker threads for per-cell recognition; 0 and 1 both mean sequential.
    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    /// Cube-splits the whole grid and recognizes every cell.
    pub fn algorithm1(&self, oracle: &OracleHandle<'_>) -> Result<RecognitionResult> {
        let start = oracle.query_count();
        let cells: Vec<CubeCell> = full_partition(self.params, Anchor::Upper).collect();
        let per_cell = run_parallel(cells, oracle, self.workers)?;
        let mut result = assemble_with(self.params, &per_cell, Vec::new(), Vec::new())?;
        result.algorithm = AlgorithmTag::Algorithm1;
        result.query_count = oracle.query_count() - start;
        result.check_against_answers(&oracle.answered())?;
        Ok(result)
    }

    /// Identifies `N_F ∩ Ĥ` with `resource`, then splits only the cells
    /// anchored at those units. Every other upper-anchored cell has a zero
    /// at its maximum and is therefore identically zero.
    pub fn algorithm2(
        &self,
        oracle: &OracleHandle<'_>,
        resource: AreaResource,
    ) -> Result<RecognitionResult> {
        let start = oracle.query_count();
        let area = self.identify_upper_area(oracle, resource)?;
        let area_queries = oracle.query_count() - start;
        let cells = partial_partition(area.units.iter().cloned(), self.params, Anchor::Upper)?;
        let per_cell = run_parallel(cells, oracle, self.workers)?;
        let mut result = assemble_with(self.params, &per_cell, area.min_units, area.max_zeros)?;
        result.algorithm = AlgorithmTag::Algorithm2(resource);
        result.query_count = oracle.query_count() - start;
        result.area_queries = area_queries;
        result.check_against_answers(&oracle.answered())?;
        Ok(result)
    }

    /// Recognizes `F` through its complement: zeros of `F` in the lower
    /// area are found first, then only lower-anchored cells whose minimum
    /// is a zero are recognized (cells with a unit minimum are all ones).
    pub fn recognize_complement(
        &self,
        oracle: &OracleHandle<'_>,
        resource: AreaResource,
    ) -> Result<RecognitionResult> {
        let start = oracle.query_count();
        let params = self.params;
        let mirror = |a: &GridPoint| {
            GridPoint::new(a.coords().iter().map(|&v| params.complement(v)).collect())
        };
        // F*(a) = 1 − F(m − a) is monotone, and its upper area is the
        // mirror image of the lower area of F.
        let mirrored = |a: &GridPoint| !oracle.query(&mirror(a));
        let mirrored_handle = OracleHandle::new(&mirrored);
        let area = self.identify_upper_area(&mirrored_handle, resource)?;
        let area_queries = oracle.query_count() - start;

        let zeros_in_lower = area.units.iter().map(mirror);
        let cells = partial_partition(zeros_in_lower, params, Anchor::Lower)?;
        let per_cell = run_parallel(cells, oracle, self.workers)?;
        let extra_units = area.max_zeros.iter().map(mirror).collect();
        let extra_zeros = area.min_units.iter().map(mirror).collect();
        let mut result = assemble_with(params, &per_cell, extra_units, extra_zeros)?;
        result.algorithm = AlgorithmTag::Complement(resource);
        result.query_count = oracle.query_count() - start;
        result.area_queries = area_queries;
        result.check_against_answers(&oracle.answered())?;
        Ok(result)
    }

    /// Exact `N_F ∩ Ĥ` using the chosen resource.
    pub fn identify_upper_area(
        &self,
        oracle: &OracleHandle<'_>,
        resource: AreaResource,
    ) -> Result<AreaIdentification> {
        let params = self.params;
        let offset = params.upper_start();
        let inner_m = params.m() - offset;
        if inner_m == 0 {
            // m = 1: the area is the single top point
            let top = params.top();
            let unit = oracle.query(&top);
            return Ok(if unit {
                AreaIdentification {
                    units: vec![top.clone()],
                    min_units: vec![top],
                    max_zeros: Vec::new(),
                }
            } else {
                AreaIdentification {
                    units: Vec::new(),
                    min_units: Vec::new(),
                    max_zeros: vec![top],
                }
            });
        }
        let inner = GridParams::new(params.n(), inner_m)?;
        let shift =
            |a: &GridPoint| GridPoint::new(a.coords().iter().map(|&v| v + offset).collect());

        let (units_inner, min_inner, max_inner) = match resource.normalized() {
            AreaResource::AreaBruteForce => {
                let assignment = sweep_area(inner, |a| oracle.query(&shift(a)))?;
                let units = inner
                    .points()
                    .filter(|a| assignment.value(a))
                    .collect::<Vec<_>>();
                (units, assignment.lower_units(), assignment.upper_zeros())
            }
            level => {
                let shifted = |a: &GridPoint| oracle.query(&shift(a));
                let inner_handle = OracleHandle::new(&shifted);
                let inner_recognizer = Recognizer::new(inner).workers(self.workers);
                let r = match level {
                    AreaResource::TwoLevelSplit => inner_recognizer.algorithm1(&inner_handle)?,
                    AreaResource::Recursive(d) => inner_recognizer
                        .algorithm2(&inner_handle, AreaResource::Recursive(d - 1))?,
                    AreaResource::AreaBruteForce => unreachable!(),
                };
                let units = inner.points().filter(|a| r.evaluate(a)).collect::<Vec<_>>();
                (units, r.lower_units.clone(), r.upper_zeros.clone())
            }
        };
        Ok(AreaIdentification {
            units: units_inner.iter().map(shift).collect(),
            min_units: min_inner.iter().map(shift).collect(),
            max_zeros: max_inner.iter().map(shift).collect(),
        })
    }
}

/// Queries the grid from the top layer down, skipping points whose value
/// is already implied; returns the full assignment.
fn sweep_area<Q>(params: GridParams, mut query: Q) -> Result<GridAssignment>
where
    Q: FnMut(&GridPoint) -> bool,
{
    let size = match params.point_count() {
        Some(c) if c <= BRUTE_FORCE_BUDGET => c as usize,
        _ => {
            return Err(Error::Capacity(format!(
                "homogeneous area {params} is too large to sweep"
            )))
        }
    };
    let radix = params.m() as usize + 1;
    let n = params.n();
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * radix;
    }
    let mut order: Vec<usize> = (0..size).collect();
    let layer = |i: usize| params.point_at(i).layer_sum();
    order.sort_by_cached_key(|&i| (std::cmp::Reverse(layer(i)), i));

    // 0 unknown, 1 zero, 2 one
    let mut state = vec![0u8; size];
    for idx in order {
        if state[idx] != 0 {
            continue;
        }
        let a = params.point_at(idx);
        let value = query(&a);
        let mark = if value { 2 } else { 1 };
        state[idx] = mark;
        let mut stack = vec![idx];
        while let Some(x) = stack.pop() {
            let mut rest = x;
            for i in (0..n).rev() {
                let c = rest % radix;
                rest /= radix;
                let y = if value {
                    if c + 1 >= radix {
                        continue;
                    }
                    x + strides[i]
                } else {
                    if c == 0 {
                        continue;
                    }
                    x - strides[i]
                };
                match state[y] {
                    s if s == mark => {}
                    0 => {
                        state[y] = mark;
                        stack.push(y);
                    }
                    _ => {
                        let (unit, zero) = if value {
                            (a.clone(), params.point_at(y))
                        } else {
                            (params.point_at(y), a.clone())
                        };
                        return Err(Error::Contradiction { unit, zero });
                    }
                }
            }
        }
    }
    GridAssignment::new(params, state.into_iter().map(|s| s == 2).collect())
}

/// Recognizes each cell's induced function independently.
///
/// Upper-anchored cells see `f(β) = F(origin(β))`; lower-anchored cells see
/// the complement `g(β) = 1 − F(origin(β))`, which is monotone under the
/// dual encoding. Output order follows input order regardless of `workers`.
pub fn run_parallel(
    cells: Vec<CubeCell>,
    oracle: &OracleHandle<'_>,
    workers: usize,
) -> Result<Vec<(CubeCell, CubeAssignment)>> {
    let mut taus: Vec<usize> = cells.iter().map(CubeCell::tau).collect();
    taus.sort_unstable();
    taus.dedup();
    let chains: HashMap<usize, Arc<Vec<Chain>>> = taus
        .into_iter()
        .map(|t| decompose(t).map(|c| (t, Arc::new(c))))
        .collect::<Result<_>>()?;

    let recognize = |cell: &CubeCell| -> Result<CubeAssignment> {
        let tau = cell.tau();
        let complement = cell.anchor() == Anchor::Lower;
        recognize_with_chains(tau, &chains[&tau], |b| {
            oracle.query(&cell.decode(b.bits())) != complement
        })
        .map_err(|e| lift_cube_error(cell, e))
    };

    let outcomes: Vec<Result<CubeAssignment>> = if workers <= 1 {
        cells.iter().map(recognize).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Capacity(format!("cannot start {workers} workers: {e}")))?;
        pool.install(|| cells.par_iter().map(recognize).collect())
    };
    cells
        .into_iter()
        .zip(outcomes)
        .map(|(c, r)| r.map(|a| (c, a)))
        .collect()
}

fn lift_cube_error(cell: &CubeCell, e: Error) -> Error {
    match e {
        Error::CubeContradiction { unit, zero } => {
            let (u, z) = (cell.decode(unit.bits()), cell.decode(zero.bits()));
            match cell.anchor() {
                Anchor::Upper => Error::Contradiction { unit: u, zero: z },
                // a unit of the complement is a zero of F
                Anchor::Lower => Error::Contradiction { unit: z, zero: u },
            }
        }
        other => other,
    }
}

/// Transfers per-cell results back to the grid and reduces them to the
/// global borders.
pub fn assemble_result(
    params: GridParams,
    per_cell: &[(CubeCell, CubeAssignment)],
) -> Result<RecognitionResult> {
    let mut r = assemble_with(params, per_cell, Vec::new(), Vec::new())?;
    r.query_count = per_cell.iter().map(|(_, a)| a.query_count() as u64).sum();
    Ok(r)
}

fn assemble_with(
    params: GridParams,
    per_cell: &[(CubeCell, CubeAssignment)],
    mut unit_candidates: Vec<GridPoint>,
    mut zero_candidates: Vec<GridPoint>,
) -> Result<RecognitionResult> {
    let mut stats = Vec::with_capacity(per_cell.len());
    for (cell, assignment) in per_cell {
        if assignment.k() != cell.tau() {
            return Err(Error::DimensionMismatch {
                expected: cell.tau(),
                actual: assignment.k(),
            });
        }
        let (units, zeros) = match cell.anchor() {
            Anchor::Upper => (assignment.min_units(), assignment.max_zeros()),
            Anchor::Lower => (assignment.max_zeros(), assignment.min_units()),
        };
        unit_candidates.extend(units.iter().map(|b| cell.decode(b.bits())));
        zero_candidates.extend(zeros.iter().map(|b| cell.decode(b.bits())));
        stats.push(CellStat {
            rep: cell.rep().clone(),
            anchor: cell.anchor(),
            tau: cell.tau(),
            queries: assignment.query_count(),
        });
    }
    let lower_units = minimal_elements(unit_candidates);
    let upper_zeros = maximal_elements(zero_candidates);
    let mut result = RecognitionResult::new(
        params,
        AlgorithmTag::Algorithm1,
        lower_units,
        upper_zeros,
        0,
    );
    result.check_invariants()?;
    result.per_cell_stats = stats;
    result.split_cells = per_cell.len();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube_split::{cell_of, BitVertex};
    use crate::oracles::{brute_force_recognize, random_monotone, ExplicitMonotone};

    fn p<const N: usize>(c: [u32; N]) -> GridPoint {
        GridPoint::from(c)
    }

    fn e53() -> GridParams {
        GridParams::new(3, 4).unwrap()
    }

    fn sample() -> ExplicitMonotone {
        ExplicitMonotone::new(e53(), [p([4, 3, 2]), p([3, 3, 3]), p([1, 4, 3])]).unwrap()
    }

    const SAMPLE_ZEROS: [[u32; 3]; 5] = [[0, 4, 4], [2, 3, 4], [3, 4, 2], [4, 2, 4], [4, 4, 1]];

    fn all_resources() -> [AreaResource; 5] {
        [
            AreaResource::AreaBruteForce,
            AreaResource::TwoLevelSplit,
            AreaResource::Recursive(0),
            AreaResource::Recursive(2),
            AreaResource::Recursive(3),
        ]
    }

    #[test]
    fn handle_caches_and_counts() {
        let calls = AtomicU64::new(0);
        let f = |a: &GridPoint| {
            calls.fetch_add(1, Ordering::Relaxed);
            a.layer_sum() > 3
        };
        let h = OracleHandle::new(&f);
        assert!(!h.query(&p([1, 1])));
        assert!(!h.query(&p([1, 1])));
        assert!(h.query(&p([2, 2])));
        assert_eq!(h.query_count(), 2);
        assert_eq!(calls.load(Ordering::Relaxed), 2);
        assert_eq!(h.answered(), vec![(p([1, 1]), false), (p([2, 2]), true)]);
    }

    #[test]
    fn algorithm1_reproduces_sample_function() {
        let f = sample();
        let h = OracleHandle::new(&f);
        let r = Recognizer::new(e53()).algorithm1(&h).unwrap();
        assert_eq!(r.lower_units(), &[p([1, 4, 3]), p([3, 3, 3]), p([4, 3, 2])]);
        assert_eq!(
            r.upper_zeros(),
            SAMPLE_ZEROS
                .iter()
                .map(|c| p(*c))
                .collect::<Vec<_>>()
                .as_slice()
        );
        assert!(r.query_count() <= 97);
        assert_eq!(r.split_cells(), 27);
        for s in r.per_cell_stats() {
            assert!(s.queries as u128 <= hansel_bound(s.tau));
        }
    }

    #[test]
    fn algorithm1_constant_functions() {
        let zero = |_: &GridPoint| false;
        let h = OracleHandle::new(&zero);
        let r = Recognizer::new(e53()).algorithm1(&h).unwrap();
        assert!(r.lower_units().is_empty());
        assert_eq!(r.upper_zeros(), &[p([4, 4, 4])]);
        assert!(r.query_count() <= 97);

        for (n, m) in [(1, 1), (2, 3), (3, 4), (2, 6)] {
            let g = GridParams::new(n, m).unwrap();
            let one = |_: &GridPoint| true;
            let r = Recognizer::new(g)
                .algorithm1(&OracleHandle::new(&one))
                .unwrap();
            assert_eq!(r.lower_units(), &[g.bottom()]);
            assert!(r.upper_zeros().is_empty());
        }
    }

    #[test]
    fn algorithm1_on_three_point_chain() {
        let g = GridParams::new(1, 2).unwrap();
        let f = |a: &GridPoint| a.coords()[0] >= 2;
        let r = Recognizer::new(g)
            .algorithm1(&OracleHandle::new(&f))
            .unwrap();
        assert_eq!(r.lower_units(), &[p([2])]);
        assert_eq!(r.upper_zeros(), &[p([1])]);
    }

    #[test]
    fn query_bound_closed_form_matches_partition() {
        for n in 1..=4 {
            for m in 1..=6 {
                let g = GridParams::new(n, m).unwrap();
                let direct: u128 = full_partition(g, Anchor::Upper)
                    .map(|c| hansel_bound(c.tau()))
                    .sum();
                assert_eq!(full_partition_query_bound(g), Some(direct));
            }
        }
        assert_eq!(full_partition_query_bound(e53()), Some(97));
    }

    #[test]
    fn algorithm2_on_sample_function() {
        let f = sample();
        let g = e53();
        // units of the listed function that lie in the upper area
        let expected: Vec<GridPoint> = g.upper_homogeneous().filter(|a| f.query(a)).collect();
        assert_eq!(expected.len(), 12);
        for resource in all_resources() {
            let h = OracleHandle::new(&f);
            let area = Recognizer::new(g)
                .identify_upper_area(&h, resource)
                .unwrap();
            assert_eq!(area.units, expected, "{resource}");

            let h = OracleHandle::new(&f);
            let r = Recognizer::new(g).algorithm2(&h, resource).unwrap();
            assert_eq!(r.lower_units(), &[p([1, 4, 3]), p([3, 3, 3]), p([4, 3, 2])]);
            assert_eq!(r.upper_zeros().len(), 5);
            assert_eq!(r.split_cells(), 12);
        }
    }

    #[test]
    fn algorithm2_sparse_cases() {
        let g = e53();
        let zero = |_: &GridPoint| false;
        let r = Recognizer::new(g)
            .algorithm2(&OracleHandle::new(&zero), AreaResource::AreaBruteForce)
            .unwrap();
        assert!(r.lower_units().is_empty());
        assert_eq!(r.split_cells(), 0);
        assert_eq!(r.query_count(), 1);

        let top = ExplicitMonotone::new(g, [g.top()]).unwrap();
        for resource in all_resources() {
            let r = Recognizer::new(g)
                .algorithm2(&OracleHandle::new(&top), resource)
                .unwrap();
            assert_eq!(r.split_cells(), 1);
            assert_eq!(r.lower_units(), &[g.top()]);
        }
    }

    #[test]
    fn identify_upper_area_of_constant_one() {
        let g = e53();
        let one = |_: &GridPoint| true;
        let area = Recognizer::new(g)
            .identify_upper_area(&OracleHandle::new(&one), AreaResource::TwoLevelSplit)
            .unwrap();
        assert_eq!(area.units, g.upper_homogeneous().collect::<Vec<_>>());
        assert_eq!(area.min_units, vec![p([2, 2, 2])]);
        assert!(area.max_zeros.is_empty());
    }

    #[test]
    fn complement_examples() {
        let f = sample();
        let h = OracleHandle::new(&f);
        let r = Recognizer::new(e53())
            .recognize_complement(&h, AreaResource::AreaBruteForce)
            .unwrap();
        let reference = Recognizer::new(e53())
            .algorithm1(&OracleHandle::new(&f))
            .unwrap();
        assert!(r.same_function(&reference));

        let one = |_: &GridPoint| true;
        let r = Recognizer::new(e53())
            .recognize_complement(&OracleHandle::new(&one), AreaResource::AreaBruteForce)
            .unwrap();
        assert_eq!(r.split_cells(), 0);
        assert_eq!(r.lower_units(), &[p([0, 0, 0])]);

        let g = GridParams::new(1, 4).unwrap();
        let f = |a: &GridPoint| a.coords()[0] >= 1;
        for resource in all_resources() {
            let r = Recognizer::new(g)
                .recognize_complement(&OracleHandle::new(&f), resource)
                .unwrap();
            assert_eq!(r.upper_zeros(), &[p([0])]);
            assert_eq!(r.lower_units(), &[p([1])]);
            assert_eq!(r.split_cells(), 1);
        }
    }

    #[test]
    fn all_routes_match_brute_force() {
        let grids = [
            (1, 1),
            (1, 5),
            (2, 1),
            (2, 4),
            (2, 5),
            (3, 2),
            (3, 3),
            (3, 4),
            (4, 3),
        ];
        for (n, m) in grids {
            let g = GridParams::new(n, m).unwrap();
            for seed in 0..20 {
                let f = random_monotone(g, (seed as f64 + 0.5) / 20.0, seed);
                let truth = brute_force_recognize(g, &OracleHandle::new(&f)).unwrap();
                let r = Recognizer::new(g)
                    .algorithm1(&OracleHandle::new(&f))
                    .unwrap();
                assert!(r.same_function(&truth), "alg1 {g} seed {seed}");
                for resource in all_resources() {
                    let r = Recognizer::new(g)
                        .algorithm2(&OracleHandle::new(&f), resource)
                        .unwrap();
                    assert!(r.same_function(&truth), "alg2 {resource} {g} seed {seed}");
                    let r = Recognizer::new(g)
                        .recognize_complement(&OracleHandle::new(&f), resource)
                        .unwrap();
                    assert!(
                        r.same_function(&truth),
                        "complement {resource} {g} seed {seed}"
                    );
                }
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let f = sample();
        let g = e53();
        let cells: Vec<_> = full_partition(g, Anchor::Upper).collect();
        let seq = run_parallel(cells.clone(), &OracleHandle::new(&f), 1).unwrap();
        for workers in [2, 4, 8] {
            let par = run_parallel(cells.clone(), &OracleHandle::new(&f), workers).unwrap();
            assert_eq!(par, seq);
        }
        assert!(run_parallel(Vec::new(), &OracleHandle::new(&f), 4)
            .unwrap()
            .is_empty());

        let cell = cell_of(p([3, 4, 3]), g, Anchor::Upper).unwrap();
        let single = run_parallel(vec![cell.clone()], &OracleHandle::new(&f), 4).unwrap();
        let direct =
            crate::hansel::recognize_cube(3, |b| f.query(&cell.from_cube(&b).unwrap())).unwrap();
        assert_eq!(single[0].1, direct);
    }

    #[test]
    fn cell_transcripts_stay_inside_their_cell() {
        let f = sample();
        let g = e53();
        let cells: Vec<_> = full_partition(g, Anchor::Upper).collect();
        for (cell, a) in run_parallel(cells, &OracleHandle::new(&f), 4).unwrap() {
            for (b, _) in a.transcript() {
                assert!(cell.contains(&cell.from_cube(b).unwrap()));
            }
        }
    }

    #[test]
    fn assemble_transfers_cell_units() {
        let g = e53();
        let cell = cell_of(p([3, 4, 3]), g, Anchor::Upper).unwrap();
        let unit = BitVertex::from_slice(&[1, 1, 0]).unwrap();
        let values = (0..8u64).map(|v| v & unit.bits() == unit.bits()).collect();
        let a = CubeAssignment::from_values(3, values).unwrap();
        let r = assemble_result(g, &[(cell, a)]).unwrap();
        assert_eq!(r.lower_units(), &[p([3, 4, 1])]);

        let zero_cells: Vec<_> = full_partition(g, Anchor::Upper)
            .map(|c| {
                let k = c.tau();
                (
                    c,
                    CubeAssignment::from_values(k, vec![false; 1 << k]).unwrap(),
                )
            })
            .collect();
        let r = assemble_result(g, &zero_cells).unwrap();
        assert!(r.lower_units().is_empty());
        assert_eq!(r.upper_zeros(), &[g.top()]);
    }

    #[test]
    fn assemble_from_brute_force_cells_gives_sample_function() {
        let g = e53();
        let f = sample();
        let per_cell: Vec<_> = full_partition(g, Anchor::Upper)
            .map(|c| {
                let k = c.tau();
                let values = (0..1u64 << k).map(|b| f.query(&c.decode(b))).collect();
                (c, CubeAssignment::from_values(k, values).unwrap())
            })
            .collect();
        let r = assemble_result(g, &per_cell).unwrap();
        assert_eq!(r.lower_units(), &[p([1, 4, 3]), p([3, 3, 3]), p([4, 3, 2])]);
        assert_eq!(
            r.upper_zeros(),
            SAMPLE_ZEROS
                .iter()
                .map(|c| p(*c))
                .collect::<Vec<_>>()
                .as_slice()
        );
    }

    #[test]
    fn non_monotone_oracle_is_reported_with_witnesses() {
        let g = e53();
        // (2,2,2) is its own cell, so the spike is queried and clashes with
        // the zero maximum of the cell of (4,4,4).
        let spike = |a: &GridPoint| a == &p([2, 2, 2]);
        match Recognizer::new(g).algorithm1(&OracleHandle::new(&spike)) {
            Err(Error::Contradiction { unit, zero }) => {
                assert!(unit.below(&zero));
                assert!(spike(&unit) && !spike(&zero));
            }
            other => panic!("expected contradiction, got {other:?}"),
        }
        // Algorithm 2 infers (2,2,2) from the zero at the top and never asks.
        let r = Recognizer::new(g)
            .algorithm2(&OracleHandle::new(&spike), AreaResource::AreaBruteForce)
            .unwrap();
        assert!(r.lower_units().is_empty());
    }

    #[test]
    fn resource_names_round_trip() {
        for r in all_resources() {
            let parsed: AreaResource = r.to_string().parse().unwrap();
            assert_eq!(parsed, r);
        }
        assert!("recursive:x".parse::<AreaResource>().is_err());
        assert_eq!(
            AreaResource::default_for(e53()),
            AreaResource::AreaBruteForce
        );
    }
}
