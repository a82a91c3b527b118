//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes and returns plain strings; results are JSON. The
//! `*_json` functions hold the logic and run natively as well.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use pairwl::harness::{builtin_fixtures, Expected};
use pairwl::wl::{indistinguishable_with, refine_with, Masking, TestKind, Unit};
use pairwl::{load_edgelist, parse_pair, Graph, Pair};

/// Round cap for interactive use; small graphs stabilize long before.
const DEMO_MAX_ITERS: usize = 64;
const DEMO_MAX_NODES: usize = 60;

fn graph(text: &str) -> Result<Graph, String> {
    let g = load_edgelist(text, None).map_err(|e| e.to_string())?;
    if g.n() > DEMO_MAX_NODES {
        return Err(format!("the demo accepts at most {DEMO_MAX_NODES} nodes, got {}", g.n()));
    }
    Ok(g)
}

fn kind(name: &str) -> Result<TestKind, String> {
    name.parse().map_err(|_| format!("unknown test {name:?}"))
}

fn pair(text: &str) -> Result<Option<Pair>, String> {
    if text.trim().is_empty() {
        return Ok(None);
    }
    parse_pair(text).map(Some).map_err(|e| e.to_string())
}

fn masking(masked: bool) -> Masking {
    if masked {
        Masking::Masked
    } else {
        Masking::Unmasked
    }
}

/// Stable coloring of a graph: per-round class counts and the final color
/// of every node (node tests) or ordered pair (pair tests, tracked pairs
/// only for local tests).
pub fn refine_json(edges: &str, test: &str, target: &str, masked: bool) -> Result<Value, String> {
    let g = graph(edges)?;
    let kind = kind(test)?;
    let target = pair(target)?;
    let r = refine_with(kind, &g, target, masking(masked), Some(DEMO_MAX_ITERS)).map_err(|e| e.to_string())?;
    let last = r.last();
    let mut nodes = Vec::new();
    let mut pairs = Vec::new();
    for (unit, color) in last.units() {
        match unit {
            Unit::Node(v) => nodes.push(json!([v, color])),
            Unit::Pair(p, q) if p != q => pairs.push(json!([p, q, color])),
            _ => {}
        }
    }
    Ok(json!({
        "test": kind,
        "n": g.n(),
        "edges": g.edges(),
        "stable_at": r.stable_at,
        "class_counts": r.class_counts(),
        "nodes": nodes,
        "pairs": pairs,
        "target_colors": target.and_then(|t| last.target_colors(t)),
    }))
}

/// Verdict of every test on two links.
pub fn distinguish_json(edges_a: &str, link_a: &str, edges_b: &str, link_b: &str, masked: bool) -> Result<Value, String> {
    let (ga, gb) = (graph(edges_a)?, graph(edges_b)?);
    let ea = pair(link_a)?.ok_or("link A is required")?;
    let eb = pair(link_b)?.ok_or("link B is required")?;
    let mut rows = Vec::new();
    for kind in TestKind::ALL {
        let v = indistinguishable_with(kind, ea, &ga, eb, &gb, masking(masked), Some(DEMO_MAX_ITERS))
            .map_err(|e| e.to_string())?;
        rows.push(json!({
            "test": kind,
            "distinguished_at": v.distinguished_at,
            "stable_at": v.stable_at,
        }));
    }
    Ok(Value::Array(rows))
}

/// The built-in fixtures with expected and computed verdicts.
pub fn fixtures_json() -> Value {
    let rows: Vec<Value> = builtin_fixtures()
        .iter()
        .map(|f| {
            let verdicts: Vec<Value> = TestKind::ALL
                .iter()
                .map(|&kind| {
                    let v = indistinguishable_with(kind, f.link_a, &f.graph_a, f.link_b, &f.graph_b, Masking::Masked, None)
                        .expect("fixtures are valid");
                    json!({
                        "test": kind,
                        "expected": f.expected_for(kind),
                        "distinguished_at": v.distinguished_at,
                        "agrees": f.expected_for(kind) == Some(if v.distinguished_at.is_some() {
                            Expected::Distinguished
                        } else {
                            Expected::Indistinguishable
                        }),
                    })
                })
                .collect();
            json!({
                "name": f.name,
                "about": f.about,
                "graph_a": f.graph_a_name,
                "edges_a": f.graph_a.to_edgelist(),
                "link_a": [f.link_a.0, f.link_a.1],
                "graph_b": f.graph_b_name,
                "edges_b": f.graph_b.to_edgelist(),
                "link_b": [f.link_b.0, f.link_b.1],
                "verdicts": verdicts,
            })
        })
        .collect();
    Value::Array(rows)
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn refine(edges: &str, test: &str, target: &str, masked: bool) -> Result<String, JsError> {
    to_js(refine_json(edges, test, target, masked))
}

#[wasm_bindgen]
pub fn distinguish(edges_a: &str, link_a: &str, edges_b: &str, link_b: &str, masked: bool) -> Result<String, JsError> {
    to_js(distinguish_json(edges_a, link_a, edges_b, link_b, masked))
}

#[wasm_bindgen]
pub fn fixtures() -> String {
    fixtures_json().to_string()
}

#[wasm_bindgen]
pub fn tests() -> String {
    json!(TestKind::ALL).to_string()
}
