use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Algorithm, Budget, OptimizeError, OptimizerConfig, ParamSpace, Point};
use crate::olsr::PARAM_COUNT;

/// Differential evolution, rand/1/bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    /// Binomial crossover rate.
    pub crossover: f64,
    /// Smallest scale applied to the difference vector.
    pub scale: f64,
    /// Each mutant draws its scale uniformly from `[scale, scale_max]`;
    /// equal bounds give the classic fixed-scale rule.
    pub scale_max: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams { crossover: 0.9, scale: 0.1, scale_max: 1.0 }
    }
}

impl DeParams {
    pub fn fixed(crossover: f64, scale: f64) -> Self {
        DeParams { crossover, scale, scale_max: scale }
    }
}

fn distinct<R: Rng + ?Sized>(n: usize, exclude: usize, rng: &mut R) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        picked[k] = loop {
            let r = rng.random_range(0..n);
            if r != exclude && !picked[..k].contains(&r) {
                break r;
            }
        };
    }
    picked
}

/// One trial vector per member: `a + f * (b - c)` for three distinct
/// other members and a freshly drawn scale `f`, crossed with the target dimension by dimension (at least
/// one dimension always from the mutant), then clamped.
pub fn de_trials<R: Rng + ?Sized>(
    members: &[Point],
    params: &DeParams,
    space: &ParamSpace,
    rng: &mut R,
) -> Result<Vec<Point>, OptimizeError> {
    if members.len() < 4 {
        return Err(OptimizeError::Population { algorithm: Algorithm::De, min: 4, got: members.len() });
    }
    Ok((0..members.len())
        .map(|i| {
            let [a, b, c] = distinct(members.len(), i, rng).map(|k| &members[k]);
            let f = if params.scale_max > params.scale {
                rng.random_range(params.scale..=params.scale_max)
            } else {
                params.scale
            };
            let forced = rng.random_range(0..PARAM_COUNT);
            let trial: Point = std::array::from_fn(|d| {
                let take_mutant = rng.random::<f64>() < params.crossover || d == forced;
                if take_mutant {
                    a[d] + f * (b[d] - c[d])
                } else {
                    members[i][d]
                }
            });
            space.clamp(&trial)
        })
        .collect())
}

/// Greedy replacement: a trial takes its target's place when it is no worse.
/// Only the first `trial_costs.len()` trials are considered.
pub fn de_select(members: &mut [Point], costs: &mut [f64], trials: &[Point], trial_costs: &[f64]) {
    for (i, &tc) in trial_costs.iter().enumerate() {
        if tc <= costs[i] {
            members[i] = trials[i];
            costs[i] = tc;
        }
    }
}

pub(super) fn run<R: Rng + ?Sized>(
    config: &OptimizerConfig,
    space: &ParamSpace,
    budget: &mut Budget<'_>,
    rng: &mut R,
) -> Result<(), OptimizeError> {
    let mut members: Vec<Point> = (0..config.population).map(|_| space.sample(rng)).collect();
    let mut costs = budget.evaluate(&members)?;
    while !budget.exhausted() {
        let trials = de_trials(&members, &config.de, space, rng)?;
        let trial_costs = budget.evaluate(&trials)?;
        de_select(&mut members, &mut costs, &trials, &trial_costs);
    }
    Ok(())
}
