//! WebAssembly bindings for the static page in `www/`.
//!
//! Every operation takes and returns plain strings (instance text, JSON,
//! DOT), so the same functions are exercised natively by the tests below.

use steiner_core::branch::{balance, heuristic_decompose};
use steiner_core::io::{
    emit_result, generate_grid_instance, length_str, parse_instance, serialize_instance, LengthDist,
};
use steiner_core::pipeline::{run_ptas, Mode, PipelineConfig};
use wasm_bindgen::prelude::*;

/// Random grid instance in the text format, lengths uniform on `1..=9`.
#[wasm_bindgen]
pub fn generate(rows: usize, cols: usize, demands: usize, seed: u64) -> Result<String, String> {
    generate_grid_instance(rows, cols, demands, LengthDist::Uniform(9), seed)
        .map(|inst| serialize_instance(&inst))
        .map_err(|e| e.to_string())
}

/// Solves `instance` in the named mode and returns the result record as JSON.
#[wasm_bindgen]
pub fn solve(instance: &str, mode: &str, epsilon: &str) -> Result<String, String> {
    let inst = parse_instance(instance).map_err(|e| e.to_string())?;
    let mode: Mode = mode.parse().map_err(|e: steiner_core::pipeline::UnknownMode| e.to_string())?;
    let epsilon = length_str::parse(epsilon).ok_or_else(|| format!("bad epsilon `{epsilon}`"))?;
    let record =
        run_ptas(&inst.graph, &inst.demands, &PipelineConfig::new(mode, epsilon)).map_err(|e| e.to_string())?;
    Ok(emit_result(&record))
}

/// Balanced heuristic branch decomposition of the instance's graph as DOT.
#[wasm_bindgen]
pub fn decomposition_dot(instance: &str) -> Result<String, String> {
    let inst = parse_instance(instance).map_err(|e| e.to_string())?;
    let (bd, _) = balance(&heuristic_decompose(&inst.graph));
    Ok(bd.to_dot(&inst.graph))
}
