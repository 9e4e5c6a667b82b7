//! Waypoint mobility traces and their text format.
//!
//! ```text
//! #!olsr-trace v1
//! #!area 1200 1200
//! #!nodes 2
//! # node time x y
//! 0 0 100 200
//! 0 10 150 200
//! 1 0 0 0
//! ```
//!
//! `#!` lines are directives, other `#` lines and trailing `#` text are
//! comments. The version directive is optional when reading. With an `area`
//! directive coordinates must lie inside `[0, width] x [0, height]`; with a
//! `nodes` directive ids must be below the declared count. Without it node
//! ids must be contiguous from 0.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::olsr::NodeId;

pub const TRACE_FORMAT_TAG: &str = "olsr-trace v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub time: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn new(width: f64, height: f64) -> Self {
        Area { width, height }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }

    pub fn size(&self) -> f64 {
        self.width * self.height
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityTrace {
    pub area: Option<Area>,
    /// Waypoints of node i, strictly increasing in time.
    pub tracks: Vec<Vec<Waypoint>>,
}

#[derive(Debug, Error, PartialEq)]
#[error("line {line}, column {column}: {kind}")]
pub struct TraceError {
    pub line: usize,
    pub column: usize,
    pub kind: TraceErrorKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceErrorKind {
    #[error("no nodes")]
    NoNodes,
    #[error("expected 4 fields (node time x y), found {0}")]
    FieldCount(usize),
    #[error("invalid {field}: {text:?}")]
    BadNumber { field: &'static str, text: String },
    #[error("node {node}: time {time} does not follow previous waypoint time {previous}")]
    NonMonotoneTime { node: u32, previous: f64, time: f64 },
    #[error("position ({x}, {y}) outside area {width}x{height}")]
    OutOfBounds { x: f64, y: f64, width: f64, height: f64 },
    #[error("unknown node id {id} (declared {declared} nodes)")]
    UnknownNode { id: u32, declared: usize },
    #[error("node {0} has no waypoints")]
    MissingNode(u32),
    #[error("unsupported directive {0:?}")]
    BadDirective(String),
}

impl MobilityTrace {
    pub fn node_count(&self) -> usize {
        self.tracks.len()
    }

    /// Trace of stationary nodes.
    pub fn stationary(area: Option<Area>, positions: &[(f64, f64)]) -> Self {
        MobilityTrace {
            area,
            tracks: positions.iter().map(|&(x, y)| vec![Waypoint { time: 0.0, x, y }]).collect(),
        }
    }

    /// Position of `node` at `time`, linearly interpolated between waypoints.
    /// Outside the track's time span the nearest endpoint is returned.
    pub fn position_at(&self, node: NodeId, time: f64) -> (f64, f64) {
        position_on_track(&self.tracks[node.0 as usize], time)
    }

    /// Speeds of each leg of a node's track, in m/s.
    pub fn leg_speeds(&self, node: NodeId) -> Vec<f64> {
        self.tracks[node.0 as usize]
            .windows(2)
            .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y) / (w[1].time - w[0].time))
            .collect()
    }

    /// Checks time ordering and, when an area is known, bounds.
    pub fn check(&self, area: Option<Area>) -> Result<(), TraceErrorKind> {
        if self.tracks.is_empty() {
            return Err(TraceErrorKind::NoNodes);
        }
        let area = area.or(self.area);
        for (i, track) in self.tracks.iter().enumerate() {
            if track.is_empty() {
                return Err(TraceErrorKind::MissingNode(i as u32));
            }
            for w in track.windows(2) {
                if w[1].time <= w[0].time || w[1].time.is_nan() {
                    return Err(TraceErrorKind::NonMonotoneTime {
                        node: i as u32,
                        previous: w[0].time,
                        time: w[1].time,
                    });
                }
            }
            if let Some(a) = area {
                for p in track {
                    if !a.contains(p.x, p.y) {
                        return Err(TraceErrorKind::OutOfBounds { x: p.x, y: p.y, width: a.width, height: a.height });
                    }
                }
            }
        }
        Ok(())
    }

    /// Renders the trace in the text format. Exact inverse of [`parse_trace`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "#!{TRACE_FORMAT_TAG}").unwrap();
        if let Some(a) = self.area {
            writeln!(out, "#!area {} {}", a.width, a.height).unwrap();
        }
        writeln!(out, "#!nodes {}", self.tracks.len()).unwrap();
        for (i, track) in self.tracks.iter().enumerate() {
            for p in track {
                writeln!(out, "{i} {} {} {}", p.time, p.x, p.y).unwrap();
            }
        }
        out
    }
}

impl fmt::Display for MobilityTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn position_on_track(track: &[Waypoint], time: f64) -> (f64, f64) {
    let first = track[0];
    if time <= first.time {
        return (first.x, first.y);
    }
    let last = track[track.len() - 1];
    if time >= last.time {
        return (last.x, last.y);
    }
    // index of the first waypoint strictly after `time`
    let hi = track.partition_point(|w| w.time <= time);
    let (a, b) = (track[hi - 1], track[hi]);
    if a.time == time {
        return (a.x, a.y);
    }
    let f = (time - a.time) / (b.time - a.time);
    (a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
}

fn err(line: usize, column: usize, kind: TraceErrorKind) -> TraceError {
    TraceError { line, column, kind }
}

/// Parses the waypoint text format.
pub fn parse_trace(text: &str) -> Result<MobilityTrace, TraceError> {
    let mut area = None;
    let mut declared: Option<usize> = None;
    let mut tracks: Vec<Vec<Waypoint>> = Vec::new();
    // line of the first waypoint of each node, for diagnostics
    let mut pending_bounds: Vec<(usize, usize, f64, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw.trim_start();
        if let Some(directive) = trimmed.strip_prefix("#!") {
            let column = raw.len() - trimmed.len() + 1;
            let words: Vec<&str> = directive.split_whitespace().collect();
            match words.as_slice() {
                ["olsr-trace", "v1"] => {}
                ["area", w, h] => {
                    let w = parse_num(w, "area width", lineno, column)?;
                    let h = parse_num(h, "area height", lineno, column)?;
                    area = Some(Area::new(w, h));
                }
                ["nodes", n] => {
                    let n = n
                        .parse::<usize>()
                        .map_err(|_| err(lineno, column, TraceErrorKind::BadNumber { field: "node count", text: n.to_string() }))?;
                    declared = Some(n);
                }
                _ => return Err(err(lineno, column, TraceErrorKind::BadDirective(directive.trim().to_string()))),
            }
            continue;
        }
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<(usize, &str)> = field_spans(content);
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 4 {
            return Err(err(lineno, fields[0].0, TraceErrorKind::FieldCount(fields.len())));
        }
        let (id_col, id_text) = fields[0];
        let id: u32 = id_text
            .parse()
            .map_err(|_| err(lineno, id_col, TraceErrorKind::BadNumber { field: "node id", text: id_text.to_string() }))?;
        if let Some(n) = declared {
            if id as usize >= n {
                return Err(err(lineno, id_col, TraceErrorKind::UnknownNode { id, declared: n }));
            }
        }
        let time = parse_num(fields[1].1, "time", lineno, fields[1].0)?;
        let x = parse_num(fields[2].1, "x", lineno, fields[2].0)?;
        let y = parse_num(fields[3].1, "y", lineno, fields[3].0)?;

        let slot = id as usize;
        if tracks.len() <= slot {
            tracks.resize_with(slot + 1, Vec::new);
        }
        let track = &mut tracks[slot];
        if let Some(prev) = track.last() {
            if time <= prev.time {
                return Err(err(
                    lineno,
                    fields[1].0,
                    TraceErrorKind::NonMonotoneTime { node: id, previous: prev.time, time },
                ));
            }
        }
        track.push(Waypoint { time, x, y });
        pending_bounds.push((lineno, fields[2].0, x, y));
    }

    if let Some(a) = area {
        for &(line, column, x, y) in &pending_bounds {
            if !a.contains(x, y) {
                return Err(err(line, column, TraceErrorKind::OutOfBounds { x, y, width: a.width, height: a.height }));
            }
        }
    }
    let count = declared.unwrap_or(tracks.len());
    if count == 0 {
        return Err(err(0, 0, TraceErrorKind::NoNodes));
    }
    tracks.resize_with(count, Vec::new);
    if let Some(missing) = tracks.iter().position(Vec::is_empty) {
        return Err(err(0, 0, TraceErrorKind::MissingNode(missing as u32)));
    }
    Ok(MobilityTrace { area, tracks })
}

fn parse_num(text: &str, field: &'static str, line: usize, column: usize) -> Result<f64, TraceError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(line, column, TraceErrorKind::BadNumber { field, text: text.to_string() })),
    }
}

/// Whitespace-separated fields with their 1-based column.
fn field_spans(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}
