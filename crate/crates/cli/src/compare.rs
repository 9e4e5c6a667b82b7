//! Cross-table of configurations against scenarios.
//!
//! Every (configuration, scenario, seed) cell is simulated once. Each
//! (configuration, scenario) row reports per-metric medians over the seeds;
//! the `global` rows take the median of those rows across scenarios.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use olsr_tune::fitness::{comm_cost, median_metrics, FitnessWeights};
use olsr_tune::netsim::{QosMetrics, Simulation};
use olsr_tune::optimizers::Algorithm;
use olsr_tune::scenario::ScenarioSpec;
use serde::Serialize;

use crate::configs::NamedConfig;
use crate::report::load_records;
use crate::write_atomic;

pub const COMPARE_FORMAT_TAG: &str = "olsr-tune-compare/1";
pub const GLOBAL: &str = "global";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub config: String,
    pub scenario: String,
    pub pdr: f64,
    pub nrl: f64,
    pub e2ed: f64,
    pub rpl: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareTable {
    pub format: String,
    pub seeds: Vec<u64>,
    pub weights: FitnessWeights,
    pub rows: Vec<CompareRow>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// The best configuration of each algorithm in a campaign directory,
/// labelled `<ALG>-best`.
pub fn optimized_configs(dir: &Path) -> Result<Vec<NamedConfig>> {
    let records = load_records(dir)?;
    Ok(Algorithm::ALL
        .into_iter()
        .filter_map(|alg| {
            records
                .iter()
                .filter(|r| r.algorithm == alg)
                .min_by(|a, b| a.best.cost.total_cmp(&b.best.cost))
                .map(|r| NamedConfig { label: format!("{alg}-best"), config: r.best.config, waiver: false })
        })
        .collect())
}

pub fn compare(configs: &[NamedConfig], scenarios: &[ScenarioSpec], seeds: &[u64], weights: FitnessWeights) -> Result<CompareTable> {
    anyhow::ensure!(!seeds.is_empty(), "at least one seed is needed");
    let mut rows = Vec::new();
    for named in configs {
        named.validate()?;
        let mut mine = Vec::new();
        for scenario in scenarios {
            let runs: Vec<QosMetrics> = seeds
                .iter()
                .map(|&seed| Simulation::new(scenario, named.config, seed).and_then(Simulation::run))
                .collect::<Result<_, _>>()
                .with_context(|| format!("simulating {} on {}", named.label, scenario.name))?;
            let m = median_metrics(&runs).expect("seeds are nonempty");
            mine.push(CompareRow {
                config: named.label.clone(),
                scenario: scenario.name.clone(),
                pdr: m.pdr,
                nrl: m.nrl,
                e2ed: m.e2ed,
                rpl: m.rpl,
                cost: comm_cost(&m, &weights)?,
            });
        }
        let global = CompareRow {
            config: named.label.clone(),
            scenario: GLOBAL.into(),
            pdr: median(mine.iter().map(|r| r.pdr).collect()),
            nrl: median(mine.iter().map(|r| r.nrl).collect()),
            e2ed: median(mine.iter().map(|r| r.e2ed).collect()),
            rpl: median(mine.iter().map(|r| r.rpl).collect()),
            cost: median(mine.iter().map(|r| r.cost).collect()),
        };
        rows.extend(mine);
        rows.push(global);
    }
    Ok(CompareTable { format: COMPARE_FORMAT_TAG.into(), seeds: seeds.to_vec(), weights, rows })
}

impl CompareTable {
    fn scenarios(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.scenario.as_str()) {
                names.push(&r.scenario);
            }
        }
        names
    }

    /// Whether `row` holds the best value of a metric within its scenario:
    /// highest pdr, lowest nrl, e2ed and cost.
    pub fn is_best(&self, row: &CompareRow, metric: &str) -> bool {
        let peers = self.rows.iter().filter(|r| r.scenario == row.scenario);
        let get = |r: &CompareRow| match metric {
            "pdr" => -r.pdr,
            "nrl" => r.nrl,
            "e2ed" => r.e2ed,
            _ => r.cost,
        };
        peers.map(get).fold(f64::INFINITY, f64::min) == get(row)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("config,scenario,pdr,nrl,e2ed,rpl,cost\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{},{}", r.config, r.scenario, r.pdr, r.nrl, r.e2ed, r.rpl, r.cost).unwrap();
        }
        out
    }

    /// One block per scenario; `*` marks the best value of each metric.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for scenario in self.scenarios() {
            writeln!(out, "{scenario}").unwrap();
            writeln!(out, "  {:<16} {:>9} {:>9} {:>10} {:>6} {:>10}", "config", "pdr", "nrl", "e2ed_ms", "rpl", "cost").unwrap();
            for r in self.rows.iter().filter(|r| r.scenario == scenario) {
                let mark = |m: &str| if self.is_best(r, m) { "*" } else { " " };
                writeln!(
                    out,
                    "  {:<16} {:>8.4}{} {:>8.4}{} {:>9.3}{} {:>6.2} {:>9.5}{}",
                    r.config,
                    r.pdr,
                    mark("pdr"),
                    r.nrl,
                    mark("nrl"),
                    r.e2ed * 1e3,
                    mark("e2ed"),
                    r.rpl,
                    r.cost,
                    mark("cost")
                )
                .unwrap();
            }
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_atomic(&dir.join("compare.csv"), &self.to_csv())?;
        write_atomic(&dir.join("compare.json"), &(serde_json::to_string_pretty(self)? + "\n"))?;
        write_atomic(&dir.join("compare.txt"), &self.to_text())
    }
}
