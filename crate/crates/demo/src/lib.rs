//! WebAssembly bindings behind `www/index.html`.
//!
//! Every export returns a JSON document. The plain Rust functions underneath
//! are public so they can be exercised natively.

use std::collections::BTreeSet;

use olsr_tune::fitness::{comm_cost, FitnessWeights};
use olsr_tune::netsim::{QosMetrics, Simulation};
use olsr_tune::olsr::{select_mprs, shortest_routes, NodeId, OlsrConfig};
use olsr_tune::optimizers::{optimize, Algorithm, Objective, OptimizerConfig, ParamSpace, Rastrigin, Sphere};
use olsr_tune::scenario::{catalog, scenario_by_name};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Side of the square area used by [`relay_view`], in meters.
pub const RELAY_AREA: f64 = 700.0;
/// Demo relay willingness for every node.
const WILLINGNESS: u8 = 3;

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub nodes: usize,
    pub duration: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimView {
    pub scenario: String,
    pub config: OlsrConfig,
    pub metrics: QosMetrics,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteView {
    pub dest: u32,
    pub next_hop: u32,
    pub hops: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelayView {
    pub area: f64,
    pub range: f64,
    pub positions: Vec<(f64, f64)>,
    pub links: Vec<(u32, u32)>,
    pub neighbors: Vec<u32>,
    pub two_hop: Vec<u32>,
    pub mprs: Vec<u32>,
    pub uncoverable: Vec<u32>,
    pub routes: Vec<RouteView>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceView {
    pub algorithm: Algorithm,
    pub objective: String,
    pub best_so_far: Vec<f64>,
    pub best_cost: f64,
    pub evaluations_to_best: usize,
}

pub fn scenarios() -> Vec<ScenarioInfo> {
    catalog().into_iter().map(|s| ScenarioInfo { nodes: s.node_count(), duration: s.duration, name: s.name }).collect()
}

/// Standard configuration with the HELLO and TC intervals replaced; hold
/// times follow at three intervals each.
pub fn interval_config(hello: f64, tc: f64, willingness: u8) -> OlsrConfig {
    OlsrConfig {
        hello_interval: hello,
        refresh_interval: hello,
        tc_interval: tc,
        willingness,
        neighb_hold_time: 3.0 * hello,
        top_hold_time: 3.0 * tc,
        mid_hold_time: 3.0 * tc,
        ..OlsrConfig::rfc3626()
    }
}

pub fn simulate_view(scenario: &str, hello: f64, tc: f64, willingness: u8, seed: u64) -> Result<SimView, String> {
    let spec = scenario_by_name(scenario).ok_or_else(|| format!("unknown scenario {scenario:?}"))?;
    let config = interval_config(hello, tc, willingness);
    config.validate().map_err(|e| e.to_string())?;
    let metrics = Simulation::new(&spec, config, seed).and_then(Simulation::run).map_err(|e| e.to_string())?;
    let cost = comm_cost(&metrics, &FitnessWeights::default()).map_err(|e| e.to_string())?;
    Ok(SimView { scenario: spec.name, config, metrics, cost })
}

/// Random unit-disk snapshot seen from node 0: its relay set and its
/// minimum-hop routes given full topology knowledge.
pub fn relay_view(nodes: usize, range: f64, seed: u64) -> Result<RelayView, String> {
    if !(2..=200).contains(&nodes) {
        return Err(format!("node count {nodes} outside 2..=200"));
    }
    if !(range.is_finite() && range > 0.0) {
        return Err(format!("radio range must be positive, got {range}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions: Vec<(f64, f64)> =
        (0..nodes).map(|_| (rng.random_range(0.0..RELAY_AREA), rng.random_range(0.0..RELAY_AREA))).collect();
    let linked = |a: usize, b: usize| {
        let (dx, dy) = (positions[a].0 - positions[b].0, positions[a].1 - positions[b].1);
        a != b && dx.hypot(dy) <= range
    };
    let links: Vec<(u32, u32)> =
        (0..nodes).flat_map(|a| (a + 1..nodes).filter(move |&b| linked(a, b)).map(move |b| (a as u32, b as u32))).collect();

    let origin = NodeId(0);
    let neighbors: BTreeSet<NodeId> = (1..nodes).filter(|&b| linked(0, b)).map(|b| NodeId(b as u32)).collect();
    let pairs: Vec<(NodeId, NodeId)> = neighbors
        .iter()
        .flat_map(|&n| (1..nodes).filter(move |&t| linked(n.0 as usize, t)).map(move |t| (n, NodeId(t as u32))))
        .collect();
    let offered: Vec<(NodeId, u8)> = neighbors.iter().map(|&n| (n, WILLINGNESS)).collect();
    let selection = select_mprs(&offered, &pairs);
    let two_hop: BTreeSet<u32> = pairs.iter().filter(|(_, t)| !neighbors.contains(t)).map(|(_, t)| t.0).collect();

    let edges = links.iter().flat_map(|&(a, b)| [(NodeId(a), NodeId(b)), (NodeId(b), NodeId(a))]);
    let routes = shortest_routes(origin, &neighbors, edges)
        .into_iter()
        .map(|(dest, r)| RouteView { dest: dest.0, next_hop: r.next_hop.0, hops: r.hops })
        .collect();

    Ok(RelayView {
        area: RELAY_AREA,
        range,
        positions,
        links,
        neighbors: neighbors.iter().map(|n| n.0).collect(),
        two_hop: two_hop.into_iter().collect(),
        mprs: selection.mprs.iter().map(|n| n.0).collect(),
        uncoverable: selection.uncoverable.iter().map(|n| n.0).collect(),
        routes,
    })
}

pub fn convergence_view(algorithm: &str, benchmark: &str, budget: usize, seed: u64) -> Result<ConvergenceView, String> {
    let algorithm: Algorithm = algorithm.parse()?;
    let (sphere, rastrigin) = (Sphere::default(), Rastrigin::default());
    let objective: &dyn Objective = match benchmark {
        "sphere" => &sphere,
        "rastrigin" => &rastrigin,
        other => return Err(format!("unknown benchmark {other:?} (expected sphere or rastrigin)")),
    };
    let cfg = OptimizerConfig::new(algorithm, seed).with_budget(budget);
    let record = optimize(&cfg, &ParamSpace::olsr(), objective).map_err(|e| e.to_string())?;
    Ok(ConvergenceView {
        algorithm,
        objective: record.objective.clone(),
        best_so_far: record.best_so_far(),
        best_cost: record.best.cost,
        evaluations_to_best: record.evaluations_to_best(),
    })
}

fn to_js<T: Serialize>(result: Result<T, String>) -> Result<String, JsValue> {
    result.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string())).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = scenarios)]
pub fn scenarios_js() -> Result<String, JsValue> {
    to_js(Ok(scenarios()))
}

#[wasm_bindgen(js_name = simulate)]
pub fn simulate_js(scenario: &str, hello: f64, tc: f64, willingness: u8, seed: u64) -> Result<String, JsValue> {
    to_js(simulate_view(scenario, hello, tc, willingness, seed))
}

#[wasm_bindgen(js_name = relays)]
pub fn relays_js(nodes: usize, range: f64, seed: u64) -> Result<String, JsValue> {
    to_js(relay_view(nodes, range, seed))
}

#[wasm_bindgen(js_name = converge)]
pub fn converge_js(algorithm: &str, benchmark: &str, budget: usize, seed: u64) -> Result<String, JsValue> {
    to_js(convergence_view(algorithm, benchmark, budget, seed))
}
