//! Run records and their text form.
//!
//! ```text
//! #!olsr-tune-run v1
//! @algorithm PSO
//! @seed 7
//! @budget 1000
//! @objective sim:congested-small
//! @time_to_best 12.5
//! @total_time 40.1
//! @best_index 517
//! @best_cost -0.4312
//! @best_raw 1.5,2,9.25,3,20,41,40.5,30
//! @best_metrics pdr=0.95,nrl=1.2,e2ed=0.004,rpl=1.3,sent=400,delivered=380,dropped=20,in_flight=0,routing_tx=456
//! index,cost,hello_interval,refresh_interval,...,dup_hold_time
//! 0,-0.12,3.4,...
//! ```
//!
//! `@best_metrics` is omitted for benchmark objectives. Floats are written in
//! shortest round-trip form, so parsing a written record gives it back exactly.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Algorithm, ParamSpace, Point};
use crate::netsim::QosMetrics;
use crate::olsr::{OlsrConfig, PARAM_COUNT};

pub const RUN_FORMAT_TAG: &str = "olsr-tune-run v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    /// Zero-based evaluation number.
    pub index: usize,
    pub cost: f64,
    pub raw: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestEntry {
    pub index: usize,
    pub cost: f64,
    pub raw: Point,
    pub config: OlsrConfig,
    pub metrics: Option<QosMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub budget: usize,
    pub objective: String,
    pub trajectory: Vec<TrajectoryPoint>,
    pub best: BestEntry,
    /// Seconds from start until the best candidate was evaluated.
    pub time_to_best: f64,
    pub total_time: f64,
}

#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

impl RunRecord {
    /// Equality of everything except wall-clock timings.
    pub fn same_result(&self, other: &RunRecord) -> bool {
        RunRecord { time_to_best: 0.0, total_time: 0.0, ..self.clone() }
            == RunRecord { time_to_best: 0.0, total_time: 0.0, ..other.clone() }
    }

    /// Lowest cost seen up to and including each evaluation.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.trajectory
            .iter()
            .scan(f64::INFINITY, |best, p| {
                *best = best.min(p.cost);
                Some(*best)
            })
            .collect()
    }

    pub fn evaluations_to_best(&self) -> usize {
        self.best.index + 1
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &Point| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        writeln!(out, "#!{RUN_FORMAT_TAG}").unwrap();
        writeln!(out, "@algorithm {}", self.algorithm).unwrap();
        writeln!(out, "@seed {}", self.seed).unwrap();
        writeln!(out, "@budget {}", self.budget).unwrap();
        writeln!(out, "@objective {}", self.objective).unwrap();
        writeln!(out, "@time_to_best {}", self.time_to_best).unwrap();
        writeln!(out, "@total_time {}", self.total_time).unwrap();
        writeln!(out, "@best_index {}", self.best.index).unwrap();
        writeln!(out, "@best_cost {}", self.best.cost).unwrap();
        writeln!(out, "@best_raw {}", join(&self.best.raw)).unwrap();
        if let Some(m) = &self.best.metrics {
            writeln!(
                out,
                "@best_metrics pdr={},nrl={},e2ed={},rpl={},sent={},delivered={},dropped={},in_flight={},routing_tx={}",
                m.pdr, m.nrl, m.e2ed, m.rpl, m.sent, m.delivered, m.dropped, m.in_flight, m.routing_tx
            )
            .unwrap();
        }
        writeln!(out, "index,cost,{}", ParamSpace::olsr().names().join(",")).unwrap();
        for p in &self.trajectory {
            writeln!(out, "{},{},{}", p.index, p.cost, join(&p.raw)).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<RunRecord, RecordError> {
        let err = |line: usize, message: String| RecordError { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim() == format!("#!{RUN_FORMAT_TAG}") => {}
            _ => return Err(err(1, format!("missing `#!{RUN_FORMAT_TAG}` header"))),
        }

        let mut fields = std::collections::BTreeMap::new();
        let mut header_line = None;
        for (n, line) in lines.by_ref() {
            if let Some(rest) = line.strip_prefix('@') {
                let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
                fields.insert(key.to_string(), (n, value.trim().to_string()));
            } else if line.starts_with("index,") {
                header_line = Some(n);
                break;
            } else if !line.trim().is_empty() {
                return Err(err(n, format!("unexpected line {line:?}")));
            }
        }
        let Some(header_line) = header_line else {
            return Err(err(text.lines().count(), "missing trajectory header".into()));
        };

        let get = |key: &str| -> Result<(usize, &str), RecordError> {
            fields.get(key).map(|(n, v)| (*n, v.as_str())).ok_or_else(|| err(header_line, format!("missing @{key}")))
        };
        fn num<T: std::str::FromStr>((n, v): (usize, &str)) -> Result<T, RecordError>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e| RecordError { line: n, message: format!("bad value {v:?}: {e}") })
        }
        let point = |(n, v): (usize, &str)| -> Result<Point, RecordError> {
            let vals: Vec<f64> = v.split(',').map(|x| num((n, x))).collect::<Result<_, _>>()?;
            vals.try_into().map_err(|v: Vec<f64>| err(n, format!("expected {PARAM_COUNT} values, got {}", v.len())))
        };

        let (an, alg) = get("algorithm")?;
        let algorithm = alg.parse::<Algorithm>().map_err(|e| err(an, e))?;
        let best_raw = point(get("best_raw")?)?;
        let metrics = match fields.get("best_metrics") {
            None => None,
            Some((n, v)) => Some(parse_metrics(v).map_err(|m| err(*n, m))?),
        };
        let (bn, _) = get("best_raw")?;
        let best = BestEntry {
            index: num(get("best_index")?)?,
            cost: num(get("best_cost")?)?,
            raw: best_raw,
            config: ParamSpace::olsr().decode(&best_raw).map_err(|e| err(bn, e.to_string()))?,
            metrics,
        };

        let mut trajectory = Vec::new();
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 2 + PARAM_COUNT {
                return Err(err(n, format!("expected {} fields, got {}", 2 + PARAM_COUNT, parts.len())));
            }
            let index: usize = num((n, parts[0]))?;
            if index != trajectory.len() {
                return Err(err(n, format!("evaluation index {index} out of sequence")));
            }
            trajectory.push(TrajectoryPoint { index, cost: num((n, parts[1]))?, raw: point((n, &line[parts[0].len() + parts[1].len() + 2..]))? });
        }

        Ok(RunRecord {
            algorithm,
            seed: num(get("seed")?)?,
            budget: num(get("budget")?)?,
            objective: get("objective")?.1.to_string(),
            trajectory,
            best,
            time_to_best: num(get("time_to_best")?)?,
            total_time: num(get("total_time")?)?,
        })
    }
}

fn parse_metrics(text: &str) -> Result<QosMetrics, String> {
    let mut m = QosMetrics { pdr: 0.0, nrl: 0.0, e2ed: 0.0, rpl: 0.0, sent: 0, delivered: 0, dropped: 0, in_flight: 0, routing_tx: 0 };
    let mut seen = 0;
    for part in text.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("bad metric {part:?}"))?;
        let real = || v.parse::<f64>().map_err(|e| format!("{k}: {e}"));
        let count = || v.parse::<u64>().map_err(|e| format!("{k}: {e}"));
        match k {
            "pdr" => m.pdr = real()?,
            "nrl" => m.nrl = real()?,
            "e2ed" => m.e2ed = real()?,
            "rpl" => m.rpl = real()?,
            "sent" => m.sent = count()?,
            "delivered" => m.delivered = count()?,
            "dropped" => m.dropped = count()?,
            "in_flight" => m.in_flight = count()?,
            "routing_tx" => m.routing_tx = count()?,
            _ => return Err(format!("unknown metric {k:?}")),
        }
        seen += 1;
    }
    if seen != 9 {
        return Err(format!("expected 9 metrics, got {seen}"));
    }
    Ok(m)
}
