//! Scenario definitions, mobility traces and the bundled catalog.

pub mod catalog;
mod mobility;
mod spec;
mod trace;

pub use catalog::{catalog, catalog_names, scenario_by_name, URBAN_SPEED};
pub use mobility::generate_random_waypoint;
pub use spec::{ScenarioError, ScenarioSpec, DEFAULT_WARMUP, SCENARIO_FORMAT_TAG};
pub use trace::{parse_trace, Area, MobilityTrace, TraceError, TraceErrorKind, Waypoint, TRACE_FORMAT_TAG};
