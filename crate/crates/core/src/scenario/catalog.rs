//! Bundled scenarios.
//!
//! | name | area | nodes | duration | sessions |
//! |------|------|-------|----------|----------|
//! | `base-malaga-like` | 1200 x 1200 m | 30 | 180 s | 10 |
//! | `congested-small` | 600 x 400 m | 10 | 60 s | 4 |
//! | `static-mesh` | 100 x 100 m | 5 static | 60 s | 2 |
//! | `static-grid` | 800 x 600 m | 12 static, 200 m grid | 90 s | 4 |
//! | `u{1,2,3}-{l,m,h}` | 120k / 240k / 360k m^2 | 10/20/30 per 120k m^2 | 120 s | nodes / 2 |
//!
//! Mobile scenarios use random-waypoint motion at 2.78-13.88 m/s (10-50 km/h).
//! The validation grid's node and session counts are fixed constants of this
//! catalog, not measured values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mobility::generate_random_waypoint;
use super::spec::{ScenarioSpec, DEFAULT_WARMUP};
use super::trace::{Area, MobilityTrace};
use crate::netsim::{CbrSession, RadioMacParams};
use crate::olsr::NodeId;

/// Urban vehicle speed envelope, m/s.
pub const URBAN_SPEED: (f64, f64) = (2.78, 13.88);

pub const BASE: &str = "base-malaga-like";
pub const CONGESTED: &str = "congested-small";
pub const STATIC_MESH: &str = "static-mesh";
pub const STATIC_GRID: &str = "static-grid";

/// Nodes per 120,000 m^2 block for the low, medium and high density tiers.
pub const DENSITY_TIERS: [(&str, usize); 3] = [("l", 10), ("m", 20), ("h", 30)];

/// Urban validation areas (name, width, height); 120k, 240k and 360k m^2.
pub const URBAN_AREAS: [(&str, f64, f64); 3] = [("u1", 400.0, 300.0), ("u2", 600.0, 400.0), ("u3", 600.0, 600.0)];

const URBAN_BLOCK: f64 = 120_000.0;

/// Every bundled scenario.
pub fn catalog() -> Vec<ScenarioSpec> {
    let mut out = vec![base(), congested(), static_mesh(), static_grid()];
    for (ui, &(uname, w, h)) in URBAN_AREAS.iter().enumerate() {
        for (di, &(dname, per_block)) in DENSITY_TIERS.iter().enumerate() {
            let blocks = (w * h / URBAN_BLOCK).round() as usize;
            out.push(urban(&format!("{uname}-{dname}"), Area::new(w, h), per_block * blocks, 100 + (ui * 3 + di) as u64));
        }
    }
    out
}

pub fn catalog_names() -> Vec<String> {
    catalog().into_iter().map(|s| s.name).collect()
}

pub fn scenario_by_name(name: &str) -> Option<ScenarioSpec> {
    match name {
        BASE | "base" => Some(base()),
        CONGESTED => Some(congested()),
        STATIC_MESH => Some(static_mesh()),
        STATIC_GRID => Some(static_grid()),
        _ => catalog().into_iter().find(|s| s.name == name),
    }
}

/// `count` sessions between distinct random endpoints, starting staggered
/// from `first_start` by `stagger` seconds.
fn random_sessions(nodes: usize, count: usize, first_start: f64, stagger: f64, duration: f64, seed: u64) -> Vec<CbrSession> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let src = rng.random_range(0..nodes);
            let mut dst = rng.random_range(0..nodes - 1);
            if dst >= src {
                dst += 1;
            }
            CbrSession::new(NodeId(src as u32), NodeId(dst as u32), first_start + i as f64 * stagger, duration)
        })
        .collect()
}

fn base() -> ScenarioSpec {
    let area = Area::new(1200.0, 1200.0);
    ScenarioSpec {
        name: BASE.into(),
        area,
        duration: 180.0,
        warmup: DEFAULT_WARMUP,
        trace: generate_random_waypoint(area, 30, 180.0, URBAN_SPEED, 2012),
        sessions: random_sessions(30, 10, 30.0, 2.0, 120.0, 3626),
        radio: RadioMacParams::default(),
    }
}

fn congested() -> ScenarioSpec {
    let area = Area::new(600.0, 400.0);
    ScenarioSpec {
        name: CONGESTED.into(),
        area,
        duration: 60.0,
        warmup: DEFAULT_WARMUP,
        trace: generate_random_waypoint(area, 10, 60.0, URBAN_SPEED, 77),
        sessions: random_sessions(10, 4, 30.0, 0.5, 25.0, 78),
        radio: RadioMacParams::default(),
    }
}

fn static_mesh() -> ScenarioSpec {
    let positions = [(10.0, 10.0), (90.0, 10.0), (50.0, 50.0), (10.0, 90.0), (90.0, 90.0)];
    ScenarioSpec {
        name: STATIC_MESH.into(),
        area: Area::new(100.0, 100.0),
        duration: 60.0,
        warmup: DEFAULT_WARMUP,
        trace: MobilityTrace::stationary(None, &positions),
        sessions: vec![
            CbrSession::new(NodeId(0), NodeId(4), 30.0, 20.0),
            CbrSession::new(NodeId(3), NodeId(1), 31.0, 20.0),
        ],
        radio: RadioMacParams::default(),
    }
}

fn static_grid() -> ScenarioSpec {
    // 4 columns x 3 rows, 200 m spacing: only axis neighbors are in range
    let positions: Vec<(f64, f64)> =
        (0..3).flat_map(|r| (0..4).map(move |c| (100.0 + 200.0 * c as f64, 100.0 + 200.0 * r as f64))).collect();
    ScenarioSpec {
        name: STATIC_GRID.into(),
        area: Area::new(800.0, 600.0),
        duration: 90.0,
        warmup: DEFAULT_WARMUP,
        trace: MobilityTrace::stationary(None, &positions),
        sessions: vec![
            CbrSession::new(NodeId(0), NodeId(11), 30.0, 50.0),
            CbrSession::new(NodeId(3), NodeId(8), 30.5, 50.0),
            CbrSession::new(NodeId(4), NodeId(7), 31.0, 50.0),
            CbrSession::new(NodeId(9), NodeId(2), 31.5, 50.0),
        ],
        radio: RadioMacParams::default(),
    }
}

fn urban(name: &str, area: Area, nodes: usize, seed: u64) -> ScenarioSpec {
    let duration = 120.0;
    ScenarioSpec {
        name: name.into(),
        area,
        duration,
        warmup: DEFAULT_WARMUP,
        trace: generate_random_waypoint(area, nodes, duration, URBAN_SPEED, seed),
        sessions: random_sessions(nodes, nodes.div_ceil(2), 30.0, 0.25, 30.0, seed + 1000),
        radio: RadioMacParams::default(),
    }
}
