//! Metaheuristic search over the OLSR parameter box.
//!
//! Every algorithm draws candidates from a single seeded generator and
//! consumes exactly the configured number of objective evaluations.
//! Population methods evaluate one generation at a time, possibly in
//! parallel; a generation that would overrun the budget is truncated.

mod budget;
mod de;
mod ga;
mod objective;
mod pso;
mod record;
mod sa;
mod space;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use budget::Budget;
pub use de::{de_select, de_trials, DeParams};
pub use ga::{ga_offspring, ga_replace, GaParams};
pub use objective::{Objective, Outcome, Rastrigin, SimObjective, Sphere};
pub use pso::{pso_absorb, pso_step, PsoParams, Swarm};
pub use record::{BestEntry, RecordError, RunRecord, TrajectoryPoint, RUN_FORMAT_TAG};
pub use sa::{metropolis, SaParams, SaState};
pub use space::{decode_params, Dimension, ParamSpace, Point};

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("expected 8 parameter values, got {0}")]
    Dimension(usize),
    #[error("parameter {name} is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("{algorithm} needs a population of at least {min}, got {got}")]
    Population { algorithm: Algorithm, min: usize, got: usize },
    #[error("budget {budget} is smaller than the population {population}")]
    BudgetBelowPopulation { budget: usize, population: usize },
    #[error("budget must be at least 1")]
    EmptyBudget,
    #[error("{name} = {value} is outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("DE scale range [{low}, {high}] is empty or not finite")]
    ScaleRange { low: f64, high: f64 },
    #[error("objective: {0}")]
    Objective(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "PSO")]
    Pso,
    #[serde(rename = "DE")]
    De,
    #[serde(rename = "GA")]
    Ga,
    #[serde(rename = "SA")]
    Sa,
    #[serde(rename = "RAND")]
    Rand,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [Algorithm::Pso, Algorithm::De, Algorithm::Ga, Algorithm::Sa, Algorithm::Rand];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Pso => "PSO",
            Algorithm::De => "DE",
            Algorithm::Ga => "GA",
            Algorithm::Sa => "SA",
            Algorithm::Rand => "RAND",
        }
    }

    pub fn is_population_based(self) -> bool {
        matches!(self, Algorithm::Pso | Algorithm::De | Algorithm::Ga)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown algorithm {s:?} (expected PSO, DE, GA, SA or RAND)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    /// Objective evaluations per run.
    pub budget: usize,
    /// Individuals per generation; ignored by SA and RAND.
    pub population: usize,
    pub pso: PsoParams,
    pub de: DeParams,
    pub ga: GaParams,
    pub sa: SaParams,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        OptimizerConfig {
            algorithm,
            budget: 1000,
            population: 10,
            pso: PsoParams::default(),
            de: DeParams::default(),
            ga: GaParams::default(),
            sa: SaParams::default(),
            seed,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_population(mut self, population: usize) -> Self {
        self.population = population;
        self
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        if self.budget == 0 {
            return Err(OptimizeError::EmptyBudget);
        }
        let min = match self.algorithm {
            Algorithm::De => 4,
            Algorithm::Pso | Algorithm::Ga => 2,
            Algorithm::Sa | Algorithm::Rand => 0,
        };
        if self.population < min {
            return Err(OptimizeError::Population { algorithm: self.algorithm, min, got: self.population });
        }
        if self.algorithm.is_population_based() && self.budget < self.population {
            return Err(OptimizeError::BudgetBelowPopulation { budget: self.budget, population: self.population });
        }
        for (name, value) in [
            ("de.crossover", self.de.crossover),
            ("ga.crossover", self.ga.crossover),
            ("ga.mutation", self.ga.mutation),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(OptimizeError::Probability { name, value });
            }
        }
        if !(self.de.scale.is_finite() && self.de.scale_max.is_finite() && self.de.scale_max >= self.de.scale) {
            return Err(OptimizeError::ScaleRange { low: self.de.scale, high: self.de.scale_max });
        }
        Ok(())
    }
}

/// Runs one optimizer to budget exhaustion and records its trajectory.
pub fn optimize(
    config: &OptimizerConfig,
    space: &ParamSpace,
    objective: &dyn Objective,
) -> Result<RunRecord, OptimizeError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut budget = Budget::new(config.budget, space, objective);
    match config.algorithm {
        Algorithm::Pso => pso::run(config, space, &mut budget, &mut rng)?,
        Algorithm::De => de::run(config, space, &mut budget, &mut rng)?,
        Algorithm::Ga => ga::run(config, space, &mut budget, &mut rng)?,
        Algorithm::Sa => sa::run(config, space, &mut budget, &mut rng)?,
        Algorithm::Rand => random_search(space, &mut budget, &mut rng)?,
    }
    Ok(budget.into_record(config.algorithm, config.seed))
}

fn random_search(space: &ParamSpace, budget: &mut Budget<'_>, rng: &mut ChaCha8Rng) -> Result<(), OptimizeError> {
    while !budget.exhausted() {
        let batch: Vec<Point> = (0..budget.remaining().min(64)).map(|_| space.sample(rng)).collect();
        budget.evaluate(&batch)?;
    }
    Ok(())
}
