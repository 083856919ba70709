//! Browser bindings. Each export takes plain numbers and returns a JSON
//! string, so the page needs no glue beyond `JSON.parse`.

use pathpower::builder::{build_path_power, BuildResult, Strategy};
use pathpower::oracle::{longest_path_power, DEFAULT_BUDGET};
use pathpower::ordering::{forward_edge_count, local_search, Ordering, SearchPolicy};
use pathpower::params::{LemmaParams, Mode};
use pathpower::tournament::gen_random;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_MATRIX_N: usize = 200;
const MAX_ORACLE_N: usize = 14;
const MAX_BUILD_N: usize = 200_000;

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Random tournament on `n` vertices, reordered by local search. The matrix
/// rows follow the final ordering, so forward edges sit above the diagonal.
pub fn order_matrix(n: usize, seed: u64, passes: usize) -> Result<Value, String> {
    if !(1..=MAX_MATRIX_N).contains(&n) {
        return Err(format!("n must be between 1 and {MAX_MATRIX_N}"));
    }
    let t = gen_random(n, seed);
    let mut ord = Ordering::identity(n);
    let before = forward_edge_count(&t, &ord);
    let policy = if passes == 0 { SearchPolicy::ToConvergence } else { SearchPolicy::MaxPasses(passes) };
    let stats = local_search(&t, &mut ord, policy);
    let perm = ord.as_slice();
    let rows: Vec<String> = perm
        .iter()
        .map(|&u| perm.iter().map(|&v| if u != v && t.beats(u, v) { '1' } else { '0' }).collect())
        .collect();
    Ok(json!({
        "n": n,
        "order": perm,
        "rows": rows,
        "forward_before": before,
        "forward_after": before + stats.gain,
        "total": n * n.saturating_sub(1) / 2,
        "passes": stats.passes,
        "converged": stats.converged,
    }))
}

/// Heuristic block-chaining build on an implicit random tournament.
pub fn build(n: usize, seed: u64, k: usize, r: usize, t: usize, w: usize) -> Result<Value, String> {
    if n > MAX_BUILD_N {
        return Err(format!("n is capped at {MAX_BUILD_N} in the browser"));
    }
    let params = LemmaParams::new(k, r, t, w).map_err(|e| e.to_string())?;
    let tour = pathpower::tournament::gen_implicit(n, seed);
    let out = build_path_power(&tour, &params, Mode::Heuristic, Strategy::Lazy).map_err(|e| e.to_string())?;
    Ok(match &out.result {
        BuildResult::Success(cert) => json!({
            "success": true,
            "blocks": cert.blocks,
            "window_starts": cert.window_starts,
            "length": cert.length,
            "bound": cert.paper_bound,
            "repairs": cert.repairs,
        }),
        BuildResult::Failed { step, report } => json!({
            "success": false,
            "step": step,
            "stage": report.stage.to_string(),
            "detail": report.detail,
        }),
    })
}

/// Exact longest `k`-th power of a path in a small random tournament.
pub fn oracle(n: usize, seed: u64, k: usize) -> Result<Value, String> {
    if !(1..=MAX_ORACLE_N).contains(&n) {
        return Err(format!("n must be between 1 and {MAX_ORACLE_N}"));
    }
    let t = gen_random(n, seed);
    let r = longest_path_power(&t, k, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    Ok(json!({ "length": r.length, "path": r.witness, "exhaustive": r.exhaustive }))
}

#[wasm_bindgen(js_name = orderMatrix)]
pub fn order_matrix_js(n: usize, seed: u32, passes: usize) -> Result<String, JsError> {
    to_js(order_matrix(n, seed.into(), passes))
}

#[wasm_bindgen(js_name = buildPathPower)]
pub fn build_js(n: usize, seed: u32, k: usize, r: usize, t: usize, w: usize) -> Result<String, JsError> {
    to_js(build(n, seed.into(), k, r, t, w))
}

#[wasm_bindgen(js_name = longestPower)]
pub fn oracle_js(n: usize, seed: u32, k: usize) -> Result<String, JsError> {
    to_js(oracle(n, seed.into(), k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_is_upper_heavy_after_search() {
        let v = order_matrix(30, 4, 0).unwrap();
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 30);
        let above: usize = rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.as_str().unwrap()[i + 1..].matches('1').count())
            .sum();
        assert_eq!(above as u64, v["forward_after"].as_u64().unwrap());
        assert!(v["converged"].as_bool().unwrap());
    }

    #[test]
    fn build_and_oracle_report_json() {
        let b = build(20_000, 1, 2, 8, 32, 100).unwrap();
        assert_eq!(b["success"], true);
        let o = oracle(8, 3, 1).unwrap();
        assert_eq!(o["length"], 7);
        assert!(oracle(40, 0, 2).is_err());
        assert!(order_matrix(0, 0, 0).is_err());
    }
}
