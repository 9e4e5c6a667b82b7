//! Weighted communication cost of an OLSR configuration.
//!
//! The cost of a run is `w_nrl * nrl + w_e2ed * e2ed - w_pdr * pdr`, with
//! pdr and nrl as plain ratios and e2ed in seconds. Lower is better; under
//! the default weights the best attainable value is -0.5.

use std::sync::atomic::{AtomicU64, Ordering};
#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
use std::time::Instant;

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
use web_time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netsim::{QosMetrics, SimError, Simulation};
use crate::olsr::OlsrConfig;
use crate::optimizers::{OptimizeError, ParamSpace};
use crate::scenario::ScenarioSpec;

#[derive(Debug, Error)]
pub enum FitnessError {
    #[error("metric {metric} is not finite ({value})")]
    NonFinite { metric: &'static str, value: f64 },
    #[error("weight {name} must be finite and non-negative, got {value}")]
    Weight { name: &'static str, value: f64 },
    #[error("at least one simulation seed is required")]
    NoSeeds,
    #[error(transparent)]
    Decode(#[from] OptimizeError),
    #[error("simulating candidate {candidate:?}: {source}")]
    Simulation { candidate: Vec<f64>, source: SimError },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessWeights {
    pub pdr: f64,
    pub nrl: f64,
    pub e2ed: f64,
}

impl Default for FitnessWeights {
    fn default() -> Self {
        FitnessWeights { pdr: 0.5, nrl: 0.2, e2ed: 0.3 }
    }
}

impl FitnessWeights {
    pub fn new(pdr: f64, nrl: f64, e2ed: f64) -> Result<Self, FitnessError> {
        let w = FitnessWeights { pdr, nrl, e2ed };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), FitnessError> {
        for (name, value) in [("pdr", self.pdr), ("nrl", self.nrl), ("e2ed", self.e2ed)] {
            if !value.is_finite() || value < 0.0 {
                return Err(FitnessError::Weight { name, value });
            }
        }
        Ok(())
    }

    /// Parses `pdr,nrl,e2ed`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad weight {p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let [pdr, nrl, e2ed] = parts[..] else {
            return Err(format!("expected three comma-separated weights, got {}", parts.len()));
        };
        Self::new(pdr, nrl, e2ed).map_err(|e| e.to_string())
    }
}

pub fn comm_cost(metrics: &QosMetrics, weights: &FitnessWeights) -> Result<f64, FitnessError> {
    for (metric, value) in [("pdr", metrics.pdr), ("nrl", metrics.nrl), ("e2ed", metrics.e2ed)] {
        if !value.is_finite() {
            return Err(FitnessError::NonFinite { metric, value });
        }
    }
    Ok(weights.nrl * metrics.nrl + weights.e2ed * metrics.e2ed - weights.pdr * metrics.pdr)
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Combines runs of one configuration: ratios and means take the per-field
/// median, packet counts are summed. Returns `None` for no runs.
pub fn median_metrics(runs: &[QosMetrics]) -> Option<QosMetrics> {
    if runs.is_empty() {
        return None;
    }
    let field = |f: fn(&QosMetrics) -> f64| median(runs.iter().map(f).collect());
    let total = |f: fn(&QosMetrics) -> u64| runs.iter().map(f).sum();
    Some(QosMetrics {
        pdr: field(|m| m.pdr),
        nrl: field(|m| m.nrl),
        e2ed: field(|m| m.e2ed),
        rpl: field(|m| m.rpl),
        sent: total(|m| m.sent),
        delivered: total(|m| m.delivered),
        dropped: total(|m| m.dropped),
        in_flight: total(|m| m.in_flight),
        routing_tx: total(|m| m.routing_tx),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub config: OlsrConfig,
    pub metrics: QosMetrics,
    pub cost: f64,
    pub seeds: Vec<u64>,
    /// Seconds spent simulating.
    pub wall_time: f64,
}

/// Runs candidates on one scenario and counts simulations.
#[derive(Debug)]
pub struct Evaluator<'a> {
    scenario: &'a ScenarioSpec,
    weights: FitnessWeights,
    seeds: Vec<u64>,
    space: ParamSpace,
    count: AtomicU64,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a ScenarioSpec, weights: FitnessWeights, seeds: Vec<u64>) -> Result<Self, FitnessError> {
        weights.validate()?;
        if seeds.is_empty() {
            return Err(FitnessError::NoSeeds);
        }
        Ok(Evaluator { scenario, weights, seeds, space: ParamSpace::olsr(), count: AtomicU64::new(0) })
    }

    pub fn scenario(&self) -> &ScenarioSpec {
        self.scenario
    }

    pub fn weights(&self) -> &FitnessWeights {
        &self.weights
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    /// Simulations run so far.
    pub fn evaluations(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    /// Decodes a raw candidate and evaluates it.
    pub fn evaluate(&self, candidate: &[f64]) -> Result<Evaluation, FitnessError> {
        let config = self.space.decode(candidate)?;
        self.run(config, true)
    }

    /// Evaluates a configuration as given. With `strict` unset, parameters
    /// outside the tuning ranges are accepted as long as they are positive.
    pub fn evaluate_config(&self, config: &OlsrConfig, strict: bool) -> Result<Evaluation, FitnessError> {
        self.run(*config, strict)
    }

    fn run(&self, config: OlsrConfig, strict: bool) -> Result<Evaluation, FitnessError> {
        let fail = |source: SimError| FitnessError::Simulation { candidate: config.to_raw().to_vec(), source };
        if strict {
            config.validate().map_err(|e| fail(e.into()))?;
        }
        if self.scenario.sessions.is_empty() {
            return Err(fail(SimError::NoSessions));
        }
        let start = Instant::now();
        let runs = self
            .seeds
            .iter()
            .map(|&seed| {
                self.count.fetch_add(1, Ordering::Relaxed);
                Simulation::new(self.scenario, config, seed)?.run()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        let metrics = median_metrics(&runs).expect("seeds are nonempty");
        let cost = comm_cost(&metrics, &self.weights)?;
        Ok(Evaluation { config, metrics, cost, seeds: self.seeds.clone(), wall_time: start.elapsed().as_secs_f64() })
    }
}

/// One-shot evaluation of a raw candidate.
pub fn evaluate(
    candidate: &[f64],
    scenario: &ScenarioSpec,
    weights: &FitnessWeights,
    seeds: &[u64],
) -> Result<Evaluation, FitnessError> {
    Evaluator::new(scenario, *weights, seeds.to_vec())?.evaluate(candidate)
}
