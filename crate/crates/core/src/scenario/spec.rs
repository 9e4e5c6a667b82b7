use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::mobility::generate_random_waypoint;
use super::trace::{parse_trace, Area, MobilityTrace, TraceError, TraceErrorKind};
use crate::netsim::{CbrSession, RadioMacParams};

pub const SCENARIO_FORMAT_TAG: &str = "olsr-tune-scenario/1";

/// Default time before the first CBR packet may be sent, seconds.
pub const DEFAULT_WARMUP: f64 = 30.0;

/// One VANET instance: area, mobility, traffic and radio constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub area: Area,
    pub duration: f64,
    /// CBR sessions may not start before this time, leaving routing room to converge.
    pub warmup: f64,
    pub trace: MobilityTrace,
    pub sessions: Vec<CbrSession>,
    pub radio: RadioMacParams,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario {name}: {reason}")]
    Invalid { name: String, reason: String },
    #[error("scenario {name}: trace: {kind}")]
    Trace { name: String, kind: TraceErrorKind },
    #[error("trace file {path}: {source}")]
    TraceFile { path: PathBuf, source: TraceError },
    #[error("scenario document: {0}")]
    Document(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ScenarioSpec {
    pub fn node_count(&self) -> usize {
        self.trace.node_count()
    }

    fn invalid(&self, reason: impl Into<String>) -> ScenarioError {
        ScenarioError::Invalid { name: self.name.clone(), reason: reason.into() }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.area.width > 0.0 && self.area.height > 0.0) {
            return Err(self.invalid("area must be positive"));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(self.invalid("duration must be positive"));
        }
        if !(self.warmup >= 0.0 && self.warmup <= self.duration) {
            return Err(self.invalid("warm-up must lie within the run"));
        }
        let r = &self.radio;
        if !(r.tx_range > 0.0 && r.bandwidth > 0.0) {
            return Err(self.invalid("tx_range and bandwidth must be positive"));
        }
        if !(r.processing_delay >= 0.0 && r.phy_overhead >= 0.0 && r.slot_time >= 0.0 && r.difs >= 0.0) {
            return Err(self.invalid("MAC timing constants must be nonnegative"));
        }
        if r.queue_limit == 0 {
            return Err(self.invalid("queue_limit must be at least 1"));
        }
        self.trace
            .check(Some(self.area))
            .map_err(|kind| ScenarioError::Trace { name: self.name.clone(), kind })?;
        let n = self.node_count();
        for (i, s) in self.sessions.iter().enumerate() {
            if s.source.0 as usize >= n || s.destination.0 as usize >= n {
                return Err(self.invalid(format!("session {i} references a node outside 0..{n}")));
            }
            if s.source == s.destination {
                return Err(self.invalid(format!("session {i} has identical source and destination")));
            }
            if !(s.duration > 0.0 && s.packet_rate > 0.0 && s.packet_size > 0) {
                return Err(self.invalid(format!("session {i} needs positive duration, rate and size")));
            }
            if s.start < self.warmup || s.start + s.duration > self.duration {
                return Err(self.invalid(format!(
                    "session {i} window [{}, {}] outside [{}, {}]",
                    s.start,
                    s.start + s.duration,
                    self.warmup,
                    self.duration
                )));
            }
        }
        Ok(())
    }

    /// Serializes to the scenario document format, trace inlined.
    pub fn to_toml_string(&self) -> String {
        let doc = ScenarioDocument {
            format: SCENARIO_FORMAT_TAG.to_string(),
            name: self.name.clone(),
            area: [self.area.width, self.area.height],
            duration: self.duration,
            warmup: self.warmup,
            nodes: self.node_count(),
            radio: self.radio,
            mobility: MobilitySource::Trace { file: None, inline: Some(self.trace.to_text()) },
            sessions: self.sessions.clone(),
        };
        toml::to_string(&doc).expect("scenario documents always serialize")
    }

    /// Parses a scenario document. Relative trace paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, ScenarioError> {
        let doc: ScenarioDocument = toml::from_str(text).map_err(|e| ScenarioError::Document(e.to_string()))?;
        if doc.format != SCENARIO_FORMAT_TAG {
            return Err(ScenarioError::Document(format!(
                "unsupported format {:?}, expected {SCENARIO_FORMAT_TAG:?}",
                doc.format
            )));
        }
        let area = Area::new(doc.area[0], doc.area[1]);
        let trace = match doc.mobility {
            MobilitySource::Trace { inline: Some(text), file: None } => {
                parse_trace(&text).map_err(|e| ScenarioError::Trace { name: doc.name.clone(), kind: e.kind })?
            }
            MobilitySource::Trace { file: Some(file), inline: None } => {
                let path = base_dir.join(file);
                let text = std::fs::read_to_string(&path).map_err(|source| ScenarioError::Io { path: path.clone(), source })?;
                parse_trace(&text).map_err(|source| ScenarioError::TraceFile { path, source })?
            }
            MobilitySource::Trace { .. } => {
                return Err(ScenarioError::Document("trace mobility needs exactly one of `file` or `inline`".into()))
            }
            MobilitySource::RandomWaypoint { min_speed, max_speed, seed } => {
                if !(min_speed > 0.0 && max_speed >= min_speed) {
                    return Err(ScenarioError::Document("random-waypoint speeds must satisfy 0 < min <= max".into()));
                }
                generate_random_waypoint(area, doc.nodes, doc.duration, (min_speed, max_speed), seed)
            }
        };
        let spec = ScenarioSpec {
            name: doc.name,
            area,
            duration: doc.duration,
            warmup: doc.warmup,
            trace,
            sessions: doc.sessions,
            radio: doc.radio,
        };
        if spec.node_count() != doc.nodes {
            return Err(spec.invalid(format!("declares {} nodes but mobility has {}", doc.nodes, spec.node_count())));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioDocument {
    format: String,
    name: String,
    area: [f64; 2],
    duration: f64,
    #[serde(default = "default_warmup")]
    warmup: f64,
    nodes: usize,
    #[serde(default)]
    radio: RadioMacParams,
    mobility: MobilitySource,
    #[serde(default)]
    sessions: Vec<CbrSession>,
}

fn default_warmup() -> f64 {
    DEFAULT_WARMUP
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum MobilitySource {
    Trace {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inline: Option<String>,
    },
    RandomWaypoint {
        min_speed: f64,
        max_speed: f64,
        seed: u64,
    },
}
