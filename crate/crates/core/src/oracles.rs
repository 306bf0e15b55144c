//! Membership oracles for monotone functions on the grid, their textual
//! specifications, a seeded generator, and the brute-force recognizer used
//! as ground truth.

use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{is_antichain, minimal_elements, GridParams, GridPoint};
use crate::recognizer::{AlgorithmTag, OracleHandle, RecognitionResult};

/// Largest grid [`brute_force_recognize`] and [`GridAssignment::evaluate`]
/// will enumerate.
pub const BRUTE_FORCE_BUDGET: u64 = 1 << 24;

/// A membership query `F: grid → {0,1}`. Implementations must be pure
/// functions of the point; they may be called from several threads.
pub trait Oracle: Sync {
    fn query(&self, a: &GridPoint) -> bool;
}

impl<F> Oracle for F
where
    F: Fn(&GridPoint) -> bool + Sync,
{
    fn query(&self, a: &GridPoint) -> bool {
        self(a)
    }
}

/// The upset of an antichain of lower units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitMonotone {
    lower_units: Vec<GridPoint>,
}

impl ExplicitMonotone {
    /// Generators are reduced to their minimal elements, so any point set
    /// is accepted.
    pub fn new<I>(params: GridParams, generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = GridPoint>,
    {
        let generators: Vec<GridPoint> = generators.into_iter().collect();
        for g in &generators {
            params.check(g)?;
        }
        let lower_units = minimal_elements(generators);
        debug_assert!(is_antichain(&lower_units));
        Ok(Self { lower_units })
    }

    pub fn lower_units(&self) -> &[GridPoint] {
        &self.lower_units
    }
}

impl Oracle for ExplicitMonotone {
    fn query(&self, a: &GridPoint) -> bool {
        self.lower_units.iter().any(|u| u.below(a))
    }
}

pub type Rational = Ratio<i128>;

/// `F(a) = 1` iff `Σ w_i·a_i >= θ`, with nonnegative rational weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdOracle {
    weights: Vec<Rational>,
    theta: Rational,
}

impl ThresholdOracle {
    pub fn new(params: GridParams, weights: Vec<Rational>, theta: Rational) -> Result<Self> {
        if weights.len() != params.n() {
            return Err(Error::DimensionMismatch {
                expected: params.n(),
                actual: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| **w < Rational::zero()) {
            return Err(Error::InvalidInput(format!(
                "threshold weight {w} is negative"
            )));
        }
        Ok(Self { weights, theta })
    }
}

impl Oracle for ThresholdOracle {
    fn query(&self, a: &GridPoint) -> bool {
        let total = self
            .weights
            .iter()
            .zip(a.coords())
            .fold(Rational::zero(), |acc, (w, &v)| {
                acc + w * Rational::from_integer(i128::from(v))
            });
        total >= self.theta
    }
}

/// Forced-zero region of a [`BasketConstraintOracle`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasketCap {
    /// `F(a) = 0` whenever `Σ a_i <= r`.
    Volume(u64),
    /// `F(a) = 0` whenever `a_i <= r_i` for every `i`.
    PerItem(Vec<u32>),
}

impl BasketCap {
    pub fn forces_zero(&self, a: &GridPoint) -> bool {
        match self {
            BasketCap::Volume(r) => a.layer_sum() <= *r,
            BasketCap::PerItem(caps) => a.coords().iter().zip(caps).all(|(v, r)| v <= r),
        }
    }
}

/// An inner monotone oracle with zeros forced on a down-set, so the
/// composite stays monotone.
pub struct BasketConstraintOracle {
    cap: BasketCap,
    inner: Box<dyn Oracle + Send>,
}

impl BasketConstraintOracle {
    pub fn new(params: GridParams, cap: BasketCap, inner: Box<dyn Oracle + Send>) -> Result<Self> {
        if let BasketCap::PerItem(caps) = &cap {
            if caps.len() != params.n() {
                return Err(Error::DimensionMismatch {
                    expected: params.n(),
                    actual: caps.len(),
                });
            }
        }
        Ok(Self { cap, inner })
    }

    pub fn cap(&self) -> &BasketCap {
        &self.cap
    }
}

impl Oracle for BasketConstraintOracle {
    fn query(&self, a: &GridPoint) -> bool {
        !self.cap.forces_zero(a) && self.inner.query(a)
    }
}

/// Seeded random monotone function given by its lower units.
///
/// `density` in `[0, 1]` biases `|N_F|`: 0 gives the constant 0, 1 the
/// constant 1. In between, up to `n+1` generators are drawn with
/// coordinates `m − ⌊u·density·(m+1)⌋` for uniform `u`, so low densities
/// keep units near the top of the grid. The generators are visited layer
/// by layer from the bottom and dominated candidates are rejected.
pub fn random_monotone(params: GridParams, density: f64, seed: u64) -> ExplicitMonotone {
    if density <= 0.0 {
        return ExplicitMonotone {
            lower_units: Vec::new(),
        };
    }
    if density >= 1.0 {
        return ExplicitMonotone {
            lower_units: vec![params.bottom()],
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = params.m();
    let count = rng.gen_range(1..=params.n() + 1);
    let mut candidates: Vec<GridPoint> = (0..count)
        .map(|_| {
            let coords = (0..params.n())
                .map(|_| {
                    let drop = (rng.gen::<f64>() * density * f64::from(m + 1)).floor() as u32;
                    m.saturating_sub(drop)
                })
                .collect();
            GridPoint::new(coords)
        })
        .collect();
    candidates.sort_by(|a, b| a.layer_sum().cmp(&b.layer_sum()).then_with(|| a.cmp(b)));
    let mut lower_units: Vec<GridPoint> = Vec::new();
    for c in candidates {
        if !lower_units.iter().any(|u| u.below(&c)) {
            lower_units.push(c);
        }
    }
    lower_units.sort();
    ExplicitMonotone { lower_units }
}

/// Declarative oracle description, as found in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OracleSpec {
    Constant {
        value: bool,
    },
    Explicit {
        lower_units: Vec<Vec<u32>>,
    },
    /// Weights and threshold as rational strings such as `"3/2"`.
    Threshold {
        weights: Vec<String>,
        theta: String,
    },
    Random {
        density: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    VolumeCap {
        r: u64,
        inner: Box<OracleSpec>,
    },
    ItemCap {
        caps: Vec<u32>,
        inner: Box<OracleSpec>,
    },
}

impl OracleSpec {
    /// Parses the compact command-line form:
    ///
    /// ```text
    /// zero | one
    /// explicit:4,3,2;3,3,3;1,4,3
    /// threshold:1,1/2,1>=3
    /// random:<density>[:<seed>]
    /// volume-cap:<r>:<inner>
    /// item-cap:<r1>,<r2>,…:<inner>
    /// ```
    pub fn parse_inline(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let bad = |what: &str| Error::InvalidInput(format!("malformed {what} oracle spec: {s:?}"));
        match kind {
            "zero" if rest.is_empty() => Ok(Self::Constant { value: false }),
            "one" if rest.is_empty() => Ok(Self::Constant { value: true }),
            "explicit" => {
                let lower_units = rest
                    .split(';')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| parse_u32_list(t).ok_or_else(|| bad("explicit")))
                    .collect::<Result<_>>()?;
                Ok(Self::Explicit { lower_units })
            }
            "threshold" => {
                let (w, theta) = rest.split_once(">=").ok_or_else(|| bad("threshold"))?;
                let weights = w.split(',').map(|x| x.trim().to_string()).collect();
                Ok(Self::Threshold {
                    weights,
                    theta: theta.trim().to_string(),
                })
            }
            "random" => {
                let (d, seed) = match rest.split_once(':') {
                    Some((d, seed)) => (d, Some(seed.trim().parse().map_err(|_| bad("random"))?)),
                    None => (rest, None),
                };
                Ok(Self::Random {
                    density: d.trim().parse().map_err(|_| bad("random"))?,
                    seed,
                })
            }
            "volume-cap" => {
                let (r, inner) = rest.split_once(':').ok_or_else(|| bad("volume-cap"))?;
                Ok(Self::VolumeCap {
                    r: r.trim().parse().map_err(|_| bad("volume-cap"))?,
                    inner: Box::new(Self::parse_inline(inner)?),
                })
            }
            "item-cap" => {
                let (caps, inner) = rest.split_once(':').ok_or_else(|| bad("item-cap"))?;
                Ok(Self::ItemCap {
                    caps: parse_u32_list(caps).ok_or_else(|| bad("item-cap"))?,
                    inner: Box::new(Self::parse_inline(inner)?),
                })
            }
            _ => Err(Error::InvalidInput(format!("unknown oracle spec {s:?}"))),
        }
    }

    /// Instantiates the oracle on a grid. `default_seed` is used by random
    /// oracles that carry no seed of their own.
    pub fn build(&self, params: GridParams, default_seed: u64) -> Result<Box<dyn Oracle + Send>> {
        Ok(match self {
            Self::Constant { value } => {
                let value = *value;
                Box::new(move |_: &GridPoint| value)
            }
            Self::Explicit { lower_units } => Box::new(ExplicitMonotone::new(
                params,
                lower_units.iter().cloned().map(GridPoint::new),
            )?),
            Self::Threshold { weights, theta } => {
                let weights = weights
                    .iter()
                    .map(|w| parse_rational(w))
                    .collect::<Result<_>>()?;
                Box::new(ThresholdOracle::new(
                    params,
                    weights,
                    parse_rational(theta)?,
                )?)
            }
            Self::Random { density, seed } => {
                if !(0.0..=1.0).contains(density) {
                    return Err(Error::InvalidInput(format!(
                        "density {density} outside [0, 1]"
                    )));
                }
                Box::new(random_monotone(
                    params,
                    *density,
                    seed.unwrap_or(default_seed),
                ))
            }
            Self::VolumeCap { r, inner } => Box::new(BasketConstraintOracle::new(
                params,
                BasketCap::Volume(*r),
                inner.build(params, default_seed)?,
            )?),
            Self::ItemCap { caps, inner } => Box::new(BasketConstraintOracle::new(
                params,
                BasketCap::PerItem(caps.clone()),
                inner.build(params, default_seed)?,
            )?),
        })
    }

    /// The same spec with every random seed made explicit.
    pub fn with_seed(&self, default_seed: u64) -> Self {
        match self {
            Self::Random { density, seed } => Self::Random {
                density: *density,
                seed: Some(seed.unwrap_or(default_seed)),
            },
            Self::VolumeCap { r, inner } => Self::VolumeCap {
                r: *r,
                inner: Box::new(inner.with_seed(default_seed)),
            },
            Self::ItemCap { caps, inner } => Self::ItemCap {
                caps: caps.clone(),
                inner: Box::new(inner.with_seed(default_seed)),
            },
            other => other.clone(),
        }
    }
}

impl FromStr for OracleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_inline(s)
    }
}

fn parse_u32_list(s: &str) -> Option<Vec<u32>> {
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim())
        .map_err(|_| Error::InvalidInput(format!("{s:?} is not a rational number")))
}

/// A complete truth table over the grid, indexed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridAssignment {
    params: GridParams,
    values: Vec<bool>,
}

impl GridAssignment {
    pub fn new(params: GridParams, values: Vec<bool>) -> Result<Self> {
        match params.point_count() {
            Some(c) if c == values.len() as u64 => Ok(Self { params, values }),
            _ => Err(Error::InvalidInput(format!(
                "assignment has {} values for {params}",
                values.len()
            ))),
        }
    }

    /// Queries every point through `oracle`.
    pub fn evaluate(params: GridParams, oracle: &dyn Oracle) -> Result<Self> {
        let count = enumeration_size(params)?;
        let values = (0..count as usize)
            .map(|i| oracle.query(&params.point_at(i)))
            .collect();
        Ok(Self { params, values })
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    pub fn value(&self, a: &GridPoint) -> bool {
        self.values[self.params.index_of(a)]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    fn strides(&self) -> Vec<usize> {
        let radix = self.params.m() as usize + 1;
        let n = self.params.n();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radix;
        }
        strides
    }

    /// Checks every covering pair `a ⋖ a + e_i`; transitivity covers the rest.
    pub fn check_monotone(&self) -> Result<()> {
        let strides = self.strides();
        let m = self.params.m();
        for (idx, &v) in self.values.iter().enumerate() {
            if !v {
                continue;
            }
            let a = self.params.point_at(idx);
            for (i, &c) in a.coords().iter().enumerate() {
                if c < m && !self.values[idx + strides[i]] {
                    return Err(Error::Contradiction {
                        unit: a,
                        zero: self.params.point_at(idx + strides[i]),
                    });
                }
            }
        }
        Ok(())
    }

    /// Units whose every lower neighbour is a zero.
    pub fn lower_units(&self) -> Vec<GridPoint> {
        let strides = self.strides();
        let mut out = Vec::new();
        for (idx, &v) in self.values.iter().enumerate() {
            if !v {
                continue;
            }
            let a = self.params.point_at(idx);
            let minimal = a
                .coords()
                .iter()
                .enumerate()
                .all(|(i, &c)| c == 0 || !self.values[idx - strides[i]]);
            if minimal {
                out.push(a);
            }
        }
        out
    }

    /// Zeros whose every upper neighbour is a unit.
    pub fn upper_zeros(&self) -> Vec<GridPoint> {
        let strides = self.strides();
        let m = self.params.m();
        let mut out = Vec::new();
        for (idx, &v) in self.values.iter().enumerate() {
            if v {
                continue;
            }
            let a = self.params.point_at(idx);
            let maximal = a
                .coords()
                .iter()
                .enumerate()
                .all(|(i, &c)| c == m || self.values[idx + strides[i]]);
            if maximal {
                out.push(a);
            }
        }
        out
    }
}

fn enumeration_size(params: GridParams) -> Result<u64> {
    match params.point_count() {
        Some(c) if c <= BRUTE_FORCE_BUDGET => Ok(c),
        _ => Err(Error::Capacity(format!(
            "{params} has more than {BRUTE_FORCE_BUDGET} points"
        ))),
    }
}

/// Verifies a complete assignment is monotone, returning a violating pair otherwise.
pub fn check_monotone(assignment: &GridAssignment) -> Result<()> {
    assignment.check_monotone()
}

/// Ground truth: queries all `(m+1)^n` points and extracts both antichains.
pub fn brute_force_recognize(
    params: GridParams,
    oracle: &OracleHandle<'_>,
) -> Result<RecognitionResult> {
    enumeration_size(params)?;
    let start = oracle.query_count();
    let assignment = GridAssignment::evaluate(params, oracle)?;
    assignment.check_monotone()?;
    Ok(RecognitionResult::new(
        params,
        AlgorithmTag::BruteForce,
        assignment.lower_units(),
        assignment.upper_zeros(),
        oracle.query_count() - start,
    ))
}
