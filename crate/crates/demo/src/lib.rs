//! Browser bindings for a two-dimensional playground. Every export returns
//! a JSON string; failures come back as `{"error": "..."}`.

use cubesplit::cube_split::full_partition;
use cubesplit::oracles::brute_force_recognize;
use cubesplit::report;
use cubesplit::{
    Anchor, AreaResource, Error, GridParams, GridPoint, OracleHandle, OracleSpec, Recognizer,
    Result,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() }))
        .to_string()
}

/// Cell index of every point of the `(m+1) × (m+1)` grid, row-major by
/// first coordinate, plus each cell's rep and dimension.
pub fn partition_json(m: u32) -> Result<Value> {
    let params = GridParams::new(2, m)?;
    let side = m as usize + 1;
    let mut cell_of = vec![0usize; side * side];
    let mut cells = Vec::new();
    for (i, cell) in full_partition(params, Anchor::Upper).enumerate() {
        for a in cell.members() {
            cell_of[a.coords()[0] as usize * side + a.coords()[1] as usize] = i;
        }
        cells.push(json!({ "rep": cell.rep(), "tau": cell.tau() }));
    }
    Ok(json!({ "m": m, "cells": cells, "cell_of": cell_of }))
}

/// Recognizes the upset of `units` (`"x,y;x,y"`) with the named algorithm
/// and reports which points were queried.
pub fn recognize_json(m: u32, units: &str, algorithm: &str) -> Result<Value> {
    let params = GridParams::new(2, m)?;
    let oracle = OracleSpec::parse_inline(&format!("explicit:{units}"))?.build(params, 0)?;
    let handle = OracleHandle::new(&*oracle);
    let rec = Recognizer::new(params);
    let resource = AreaResource::default_for(params);
    let result = match algorithm {
        "alg1" => rec.algorithm1(&handle)?,
        "alg2" => rec.algorithm2(&handle, resource)?,
        "complement" => rec.recognize_complement(&handle, resource)?,
        "brute" => brute_force_recognize(params, &handle)?,
        other => return Err(Error::InvalidInput(format!("unknown algorithm {other}"))),
    };
    let side = m as usize + 1;
    let values: Vec<bool> = (0..side * side)
        .map(|i| result.evaluate(&GridPoint::new(vec![(i / side) as u32, (i % side) as u32])))
        .collect();
    let queried: Vec<GridPoint> = handle.answered().into_iter().map(|(a, _)| a).collect();
    Ok(json!({
        "algorithm": result.algorithm(),
        "values": values,
        "queried": queried,
        "lower_units": result.lower_units(),
        "upper_zeros": result.upper_zeros(),
        "query_count": result.query_count(),
        "split_cells": result.split_cells(),
        "points": side * side,
    }))
}

pub fn bounds_json(n: usize, m: u32) -> Result<Value> {
    Ok(serde_json::to_value(report::bounds(GridParams::new(n, m)?)).expect("bounds serialize"))
}

#[wasm_bindgen]
pub fn partition(m: u32) -> String {
    respond(partition_json(m))
}

#[wasm_bindgen]
pub fn recognize(m: u32, units: &str, algorithm: &str) -> String {
    respond(recognize_json(m, units, algorithm))
}

#[wasm_bindgen]
pub fn bounds(n: usize, m: u32) -> String {
    respond(bounds_json(n, m))
}
