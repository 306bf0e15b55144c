//! Run configuration and machine-readable reports.
//!
//! Reports are JSON objects with sorted keys. Everything that depends on
//! timing or thread count lives under `perf`; the rest is byte-stable for a
//! fixed configuration and seed.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cube_split::{cell_of, Anchor, BitVertex};
use crate::error::{Error, Result};
use crate::grid::{GridParams, GridPoint};
use crate::oracles::{brute_force_recognize, OracleSpec};
use crate::recognizer::{
    full_partition_query_bound, AreaResource, OracleHandle, RecognitionResult, Recognizer,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Algorithm selectable from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Alg1,
    Alg2,
    Complement,
    Brute,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg2 => "alg2",
            Algorithm::Complement => "complement",
            Algorithm::Brute => "brute",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "alg1" => Ok(Algorithm::Alg1),
            "alg2" => Ok(Algorithm::Alg2),
            "complement" => Ok(Algorithm::Complement),
            "brute" => Ok(Algorithm::Brute),
            other => Err(Error::InvalidInput(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Declarative configuration file. Every field may be overridden by a
/// command-line flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub m: Option<u32>,
    pub oracle: Option<OracleSpec>,
    pub algorithm: Option<Algorithm>,
    pub algorithms: Option<Vec<Algorithm>>,
    pub resource: Option<String>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("bad configuration: {e}")))
    }
}

/// A fully resolved single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: GridParams,
    pub oracle: OracleSpec,
    pub algorithm: Algorithm,
    pub resource: Option<AreaResource>,
    pub workers: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(params: GridParams, oracle: OracleSpec, algorithm: Algorithm) -> Self {
        Self {
            params,
            oracle,
            algorithm,
            resource: None,
            workers: 1,
            seed: 0,
        }
    }

    pub fn resource(&self) -> AreaResource {
        self.resource
            .unwrap_or_else(|| AreaResource::default_for(self.params))
    }
}

/// Query bounds and reference counts for one grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub brute_force_count: Option<u64>,
    /// Sum of per-cell Hansel bounds over the full partition.
    pub hansel_total_bound: Option<u64>,
    pub middle_layer: Option<u64>,
    pub next_layer: Option<u64>,
    /// `|M_0| + ⌊log₂ m⌋·|N_0|`
    pub alekseev_bound: Option<u64>,
    /// `|M_0| + |N_0|`, the floor for any recognizer.
    pub optimal_floor: Option<u64>,
    pub upper_area_middle_layer: Option<u64>,
    pub upper_area_next_layer: Option<u64>,
    /// `|M_1| + ⌈log₂⌈m/2⌉⌉·|N_1|` on the upper homogeneous area.
    pub upper_area_alekseev_bound: Option<u64>,
    pub homogeneous_cells: Option<u64>,
}

fn narrow(v: u128) -> Option<u64> {
    u64::try_from(v).ok()
}

pub fn bounds(params: GridParams) -> Bounds {
    let mid = params.middle_layer_stats();
    let area = params.upper_area_stats();
    Bounds {
        brute_force_count: params.point_count(),
        hansel_total_bound: full_partition_query_bound(params).and_then(narrow),
        middle_layer: narrow(mid.middle),
        next_layer: narrow(mid.next),
        alekseev_bound: narrow(mid.bound),
        optimal_floor: narrow(mid.optimal_floor()),
        upper_area_middle_layer: narrow(area.middle),
        upper_area_next_layer: narrow(area.next),
        upper_area_alekseev_bound: narrow(area.bound),
        homogeneous_cells: params.homogeneous_count(),
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: RunConfig,
    pub result: RecognitionResult,
    pub bounds: Bounds,
    pub wall_time_ms: f64,
}

impl RunReport {
    /// Report without the `perf` block; identical across worker counts.
    pub fn stable_value(&self) -> Value {
        let c = &self.config;
        let resource = matches!(c.algorithm, Algorithm::Alg2 | Algorithm::Complement)
            .then(|| c.resource().to_string());
        let r = &self.result;
        json!({
            "schema_version": SCHEMA_VERSION,
            "grid": { "n": c.params.n(), "m": c.params.m() },
            "oracle": c.oracle.with_seed(c.seed),
            "algorithm": { "name": c.algorithm, "resource": resource, "tag": r.algorithm() },
            "result": {
                "lower_units": r.lower_units(),
                "upper_zeros": r.upper_zeros(),
                "query_count": r.query_count(),
                "split_cells": r.split_cells(),
                "area_queries": r.area_queries(),
                "per_cell_stats": r.per_cell_stats(),
            },
            "bounds": self.bounds,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut v = self.stable_value();
        v["perf"] = json!({ "wall_time_ms": self.wall_time_ms, "workers": self.config.workers });
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report serializes")
    }
}

/// Executes one configured recognition.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let oracle = config.oracle.build(config.params, config.seed)?;
    let handle = OracleHandle::new(&*oracle);
    let recognizer = Recognizer::new(config.params).workers(config.workers);
    let started = Instant::now();
    let result = match config.algorithm {
        Algorithm::Alg1 => recognizer.algorithm1(&handle)?,
        Algorithm::Alg2 => recognizer.algorithm2(&handle, config.resource())?,
        Algorithm::Complement => recognizer.recognize_complement(&handle, config.resource())?,
        Algorithm::Brute => brute_force_recognize(config.params, &handle)?,
    };
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let bounds = bounds(config.params);
    if matches!(config.algorithm, Algorithm::Alg1 | Algorithm::Alg2) {
        if let Some(total) = bounds.brute_force_count {
            if result.query_count() > total {
                return Err(Error::Inconsistent(format!(
                    "{} used {} queries on a grid of {total} points",
                    config.algorithm,
                    result.query_count()
                )));
            }
        }
    }
    Ok(RunReport {
        config: config.clone(),
        result,
        bounds,
        wall_time_ms,
    })
}

/// Several algorithms on one oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub reports: Vec<RunReport>,
}

impl CompareReport {
    pub fn to_value(&self) -> Value {
        let summary: Vec<Value> = self
            .reports
            .iter()
            .map(|r| json!({ "algorithm": r.result.algorithm(), "query_count": r.result.query_count() }))
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "summary": summary,
            "reports": self.reports.iter().map(RunReport::to_value).collect::<Vec<_>>(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report serializes")
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::from("algorithm                 queries\n");
        for r in &self.reports {
            out.push_str(&format!(
                "{:<24} {:>8}\n",
                r.result.algorithm().to_string(),
                r.result.query_count()
            ));
        }
        out
    }
}

/// Runs every algorithm in `algorithms` on the same oracle and fails unless
/// all of them identify the same function.
pub fn compare(base: &RunConfig, algorithms: &[Algorithm]) -> Result<CompareReport> {
    if algorithms.len() < 2 {
        return Err(Error::InvalidInput(
            "compare needs at least two algorithms".into(),
        ));
    }
    let reports = algorithms
        .iter()
        .map(|&algorithm| {
            run(&RunConfig {
                algorithm,
                ..base.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = &reports[0].result;
    for r in &reports[1..] {
        if !r.result.same_function(first) {
            return Err(Error::Inconsistent(format!(
                "{} and {} identified different functions",
                first.algorithm(),
                r.result.algorithm()
            )));
        }
    }
    Ok(CompareReport { reports })
}

/// The worked examples on `E_5^3`: the compact cell of `(2,3,4)`, the
/// reverse mapping of `(1,0)`, the chain transfer in the cell of `(3,4,3)`,
/// and full recognition of the function with lower units
/// `(4,3,2), (3,3,3), (1,4,3)`.
pub fn worked_examples() -> Result<Value> {
    let params = GridParams::new(3, 4)?;
    let cell = cell_of(GridPoint::from([2, 3, 4]), params, Anchor::Upper)?;
    let beta = BitVertex::from_slice(&[1, 0])?;
    let origin = cell.from_cube(&beta)?;

    let cube = cell_of(GridPoint::from([3, 4, 3]), params, Anchor::Upper)?;
    let chain: Vec<BitVertex> = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1]]
        .iter()
        .map(|b| BitVertex::from_slice(b))
        .collect::<Result<_>>()?;
    let transferred = chain
        .iter()
        .map(|b| cube.from_cube(b))
        .collect::<Result<Vec<_>>>()?;

    let spec = OracleSpec::Explicit {
        lower_units: vec![vec![4, 3, 2], vec![3, 3, 3], vec![1, 4, 3]],
    };
    let report = run(&RunConfig::new(params, spec, Algorithm::Alg1))?;

    Ok(json!({
        "compact_cell": {
            "rep": cell.rep(),
            "tau": cell.tau(),
            "positions": cell.positions().iter().map(|i| i + 1).collect::<Vec<_>>(),
            "values": cell.values(),
        },
        "reverse_mapping": { "beta": beta.to_vec(), "origin": origin },
        "chain_transfer": {
            "cell": cube.rep(),
            "induced": chain.iter().map(BitVertex::to_vec).collect::<Vec<_>>(),
            "origin": transferred,
        },
        "recognition": report.stable_value(),
    }))
}
