use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use olsr_tune::fitness::{comm_cost, FitnessWeights};
use olsr_tune::netsim::{QosMetrics, Simulation};
use olsr_tune::olsr::OlsrConfig;
use olsr_tune::scenario::ScenarioSpec;
use serde::{Deserialize, Serialize};

use crate::configs::NamedConfig;

pub const SIM_REPORT_TAG: &str = "olsr-tune-sim/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub format: String,
    pub scenario: String,
    pub config_label: String,
    pub seed: u64,
    pub weights: FitnessWeights,
    pub config: OlsrConfig,
    pub metrics: QosMetrics,
    pub cost: f64,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// One simulation, optionally writing the event log to `event_log`.
pub fn simulate(
    scenario: &ScenarioSpec,
    named: &NamedConfig,
    seed: u64,
    weights: FitnessWeights,
    event_log: Option<&Path>,
) -> Result<SimReport> {
    named.validate()?;
    let mut sim = Simulation::new(scenario, named.config, seed)?;
    if let Some(path) = event_log {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        sim = sim.with_event_log(Box::new(BufWriter::new(file)));
    }
    let metrics = sim.run()?;
    let cost = comm_cost(&metrics, &weights)?;
    Ok(SimReport {
        format: SIM_REPORT_TAG.into(),
        scenario: scenario.name.clone(),
        config_label: named.label.clone(),
        seed,
        weights,
        config: named.config,
        metrics,
        cost,
    })
}
