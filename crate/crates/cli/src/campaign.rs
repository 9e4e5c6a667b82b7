//! Optimization campaigns: several algorithms, several independent runs each.
//!
//! Output directory layout:
//!
//! ```text
//! campaign.toml          the campaign, written before any run
//! runs/<ALG>-<seed>.run  one run record per (algorithm, seed)
//! manifest.json          index of completed records, written last
//! summary.* timing.csv trajectories.csv   see `report`
//! ```
//!
//! Rerunning a campaign into the same directory skips every record that
//! already exists and parses.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use olsr_tune::fitness::{Evaluator, FitnessWeights};
use olsr_tune::optimizers::{optimize, Algorithm, Objective, OptimizerConfig, ParamSpace, Rastrigin, RunRecord, SimObjective, Sphere};
use serde::{Deserialize, Serialize};

use crate::report::{write_reports, ReportFormat, Summary};
use crate::{resolve_scenario, write_atomic};

pub const CAMPAIGN_FORMAT_TAG: &str = "olsr-tune-campaign/1";
pub const MANIFEST_FORMAT_TAG: &str = "olsr-tune-manifest/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Benchmark {
    Sphere,
    Rastrigin,
}

impl std::str::FromStr for Benchmark {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(Benchmark::Sphere),
            "rastrigin" => Ok(Benchmark::Rastrigin),
            _ => Err(format!("unknown benchmark {s:?} (expected sphere or rastrigin)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub format: String,
    /// Bundled scenario name or scenario file; exclusive with `benchmark`.
    pub scenario: Option<String>,
    pub benchmark: Option<Benchmark>,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub budget: usize,
    pub population: usize,
    pub weights: FitnessWeights,
    /// Simulation seeds per evaluation; the cost uses median metrics.
    pub eval_seeds: Vec<u64>,
    /// Run `i` uses optimizer seed `base_seed + i`.
    pub base_seed: u64,
}

impl Default for CampaignSpec {
    fn default() -> Self {
        CampaignSpec {
            format: CAMPAIGN_FORMAT_TAG.into(),
            scenario: Some("base-malaga-like".into()),
            benchmark: None,
            algorithms: Algorithm::ALL.to_vec(),
            runs: 30,
            budget: 1000,
            population: 10,
            weights: FitnessWeights::default(),
            eval_seeds: vec![1],
            base_seed: 1,
        }
    }
}

impl CampaignSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec: CampaignSpec = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("campaign serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != CAMPAIGN_FORMAT_TAG {
            bail!("expected format {CAMPAIGN_FORMAT_TAG:?}, found {:?}", self.format);
        }
        match (&self.scenario, self.benchmark) {
            (Some(_), Some(_)) => bail!("give either a scenario or a benchmark, not both"),
            (None, None) => bail!("a campaign needs a scenario or a benchmark"),
            (Some(s), None) => {
                resolve_scenario(s)?;
            }
            (None, Some(_)) => {}
        }
        if self.runs == 0 {
            bail!("runs must be at least 1");
        }
        if self.algorithms.is_empty() {
            bail!("no algorithms selected");
        }
        if self.eval_seeds.is_empty() {
            bail!("at least one evaluation seed is needed");
        }
        self.weights.validate()?;
        for &alg in &self.algorithms {
            self.optimizer(alg, 0).validate()?;
        }
        Ok(())
    }

    pub fn optimizer(&self, algorithm: Algorithm, run: usize) -> OptimizerConfig {
        OptimizerConfig::new(algorithm, self.base_seed + run as u64).with_budget(self.budget).with_population(self.population)
    }
}

pub fn record_path(dir: &Path, algorithm: Algorithm, seed: u64) -> PathBuf {
    dir.join("runs").join(format!("{algorithm}-{seed}.run"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub file: String,
    pub best_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub campaign: CampaignSpec,
    pub records: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub executed: usize,
    pub resumed: usize,
    pub summary: Summary,
}

/// Runs (or resumes) a campaign into `dir`, then writes the manifest and
/// summaries. `progress` receives one line per finished run.
pub fn run_campaign(spec: &CampaignSpec, dir: &Path, mut progress: impl FnMut(&str)) -> Result<CampaignOutcome> {
    spec.validate()?;
    let spec_path = dir.join("campaign.toml");
    if spec_path.exists() {
        let existing = CampaignSpec::load(&spec_path)?;
        if &existing != spec {
            bail!("{} holds a different campaign; use another output directory", dir.display());
        }
    } else {
        write_atomic(&spec_path, &spec.to_toml())?;
    }

    let scenario = spec.scenario.as_deref().map(resolve_scenario).transpose()?;
    let evaluator = match &scenario {
        Some(s) => Some(Evaluator::new(s, spec.weights, spec.eval_seeds.clone())?),
        None => None,
    };
    let sim_objective = evaluator.map(SimObjective::new);
    let (sphere, rastrigin) = (Sphere::default(), Rastrigin::default());
    let objective: &dyn Objective = match (&sim_objective, spec.benchmark) {
        (Some(o), _) => o,
        (None, Some(Benchmark::Sphere)) => &sphere,
        (None, Some(Benchmark::Rastrigin)) => &rastrigin,
        (None, None) => unreachable!("validated"),
    };

    let space = ParamSpace::olsr();
    let (mut executed, mut resumed) = (0, 0);
    let mut records = Vec::new();
    for &alg in &spec.algorithms {
        for run in 0..spec.runs {
            let cfg = spec.optimizer(alg, run);
            let path = record_path(dir, alg, cfg.seed);
            let existing = fs::read_to_string(&path).ok().and_then(|t| RunRecord::parse(&t).ok());
            let record = match existing {
                Some(r) if r.algorithm == alg && r.seed == cfg.seed && r.budget == spec.budget => {
                    resumed += 1;
                    r
                }
                _ => {
                    let r = optimize(&cfg, &space, objective)?;
                    write_atomic(&path, &r.to_text())?;
                    executed += 1;
                    progress(&format!("{alg} seed {}: best {:.6} after {} evaluations", cfg.seed, r.best.cost, r.evaluations_to_best()));
                    r
                }
            };
            records.push(record);
        }
    }

    let manifest = Manifest {
        format: MANIFEST_FORMAT_TAG.into(),
        campaign: spec.clone(),
        records: records
            .iter()
            .map(|r| ManifestEntry {
                algorithm: r.algorithm,
                seed: r.seed,
                file: format!("runs/{}-{}.run", r.algorithm, r.seed),
                best_cost: r.best.cost,
            })
            .collect(),
    };
    let summary = write_reports(&records, dir, ReportFormat::All)?;
    write_atomic(&dir.join("manifest.json"), &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    Ok(CampaignOutcome { executed, resumed, summary })
}
