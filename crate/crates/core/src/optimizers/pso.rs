use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Budget, OptimizeError, OptimizerConfig, ParamSpace, Point};
use crate::olsr::PARAM_COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub inertia: f64,
    /// Pull towards the particle's own best.
    pub cognitive: f64,
    /// Pull towards the swarm's best.
    pub social: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams { inertia: 0.5, cognitive: 2.0, social: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub positions: Vec<Point>,
    pub velocities: Vec<Point>,
    pub best_positions: Vec<Point>,
    pub best_costs: Vec<f64>,
    pub global_best: Point,
    pub global_best_cost: f64,
}

impl Swarm {
    /// Particles at rest at the given positions, nothing evaluated yet.
    pub fn new(positions: Vec<Point>) -> Self {
        let n = positions.len();
        Swarm {
            velocities: vec![[0.0; PARAM_COUNT]; n],
            best_positions: positions.clone(),
            best_costs: vec![f64::INFINITY; n],
            global_best: positions.first().copied().unwrap_or([0.0; PARAM_COUNT]),
            global_best_cost: f64::INFINITY,
            positions,
        }
    }
}

/// Moves every particle once: inertia plus random pulls towards the
/// personal and global bests, velocity limited to one range per dimension,
/// and positions clamped with the velocity zeroed where clamping happened.
pub fn pso_step<R: Rng + ?Sized>(swarm: &mut Swarm, params: &PsoParams, space: &ParamSpace, rng: &mut R) {
    for p in 0..swarm.positions.len() {
        for (d, dim) in space.dims().iter().enumerate() {
            let x = swarm.positions[p][d];
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let limit = dim.range();
            let v = params.inertia * swarm.velocities[p][d]
                + params.cognitive * r1 * (swarm.best_positions[p][d] - x)
                + params.social * r2 * (swarm.global_best[d] - x);
            let v = v.clamp(-limit, limit);
            let moved = x + v;
            let clamped = dim.clamp(moved);
            swarm.positions[p][d] = clamped;
            swarm.velocities[p][d] = if clamped == moved { v } else { 0.0 };
        }
    }
}

/// Folds the costs of the first `costs.len()` particles into the bests.
pub fn pso_absorb(swarm: &mut Swarm, costs: &[f64]) {
    for (p, &c) in costs.iter().enumerate() {
        if c < swarm.best_costs[p] {
            swarm.best_costs[p] = c;
            swarm.best_positions[p] = swarm.positions[p];
        }
        if c < swarm.global_best_cost {
            swarm.global_best_cost = c;
            swarm.global_best = swarm.positions[p];
        }
    }
}

pub(super) fn run<R: Rng + ?Sized>(
    config: &OptimizerConfig,
    space: &ParamSpace,
    budget: &mut Budget<'_>,
    rng: &mut R,
) -> Result<(), OptimizeError> {
    let mut swarm = Swarm::new((0..config.population).map(|_| space.sample(rng)).collect());
    let costs = budget.evaluate(&swarm.positions)?;
    pso_absorb(&mut swarm, &costs);
    while !budget.exhausted() {
        pso_step(&mut swarm, &config.pso, space, rng);
        let costs = budget.evaluate(&swarm.positions)?;
        pso_absorb(&mut swarm, &costs);
    }
    Ok(())
}
