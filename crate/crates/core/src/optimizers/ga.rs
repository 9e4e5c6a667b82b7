use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Budget, OptimizeError, OptimizerConfig, ParamSpace, Point};

/// Real-coded GA: binary tournament, arithmetic blend crossover, uniform
/// random-reset mutation, one elite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub crossover: f64,
    /// Per-gene reset probability.
    pub mutation: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams { crossover: 0.8, mutation: 0.01 }
    }
}

fn tournament<R: Rng + ?Sized>(costs: &[f64], rng: &mut R) -> usize {
    let a = rng.random_range(0..costs.len());
    let b = rng.random_range(0..costs.len());
    if costs[b] < costs[a] {
        b
    } else {
        a
    }
}

/// Breeds as many children as there are members.
pub fn ga_offspring<R: Rng + ?Sized>(
    members: &[Point],
    costs: &[f64],
    params: &GaParams,
    space: &ParamSpace,
    rng: &mut R,
) -> Vec<Point> {
    let n = members.len();
    let mut children = Vec::with_capacity(n + 1);
    while children.len() < n {
        let p1 = members[tournament(costs, rng)];
        let p2 = members[tournament(costs, rng)];
        let (c1, c2) = if rng.random::<f64>() < params.crossover {
            let alpha: f64 = rng.random();
            (
                std::array::from_fn(|d| alpha * p1[d] + (1.0 - alpha) * p2[d]),
                std::array::from_fn(|d| (1.0 - alpha) * p1[d] + alpha * p2[d]),
            )
        } else {
            (p1, p2)
        };
        children.push(c1);
        children.push(c2);
    }
    children.truncate(n);
    for child in &mut children {
        for (gene, dim) in child.iter_mut().zip(space.dims()) {
            if rng.random::<f64>() < params.mutation {
                *gene = rng.random_range(dim.lower..=dim.upper);
            }
        }
    }
    children
}

/// Children become the new generation, except that the worst child is
/// replaced by the previous generation's best member.
pub fn ga_replace(members: &mut Vec<Point>, costs: &mut Vec<f64>, children: Vec<Point>, child_costs: Vec<f64>) {
    let elite = argmin(costs);
    let (elite_point, elite_cost) = (members[elite], costs[elite]);
    *members = children;
    *costs = child_costs;
    let worst = costs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).expect("nonempty");
    members[worst] = elite_point;
    costs[worst] = elite_cost;
}

fn argmin(costs: &[f64]) -> usize {
    costs.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).expect("nonempty")
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
        let children = ga_offspring(&members, &costs, &config.ga, space, rng);
        let child_costs = budget.evaluate(&children)?;
        if child_costs.len() < children.len() {
            break;
        }
        ga_replace(&mut members, &mut costs, children, child_costs);
    }
    Ok(())
}
