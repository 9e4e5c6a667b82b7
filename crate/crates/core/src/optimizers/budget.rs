#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
use std::time::Instant;

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
use web_time::Instant;

use rayon::prelude::*;

use super::{Algorithm, BestEntry, Objective, OptimizeError, ParamSpace, Point, RunRecord, TrajectoryPoint};

/// Evaluation accounting shared by all algorithms: enforces the budget,
/// records the trajectory and tracks the best candidate.
pub struct Budget<'a> {
    limit: usize,
    space: &'a ParamSpace,
    objective: &'a dyn Objective,
    trajectory: Vec<TrajectoryPoint>,
    best: Option<BestEntry>,
    started: Instant,
    time_to_best: f64,
}

impl<'a> Budget<'a> {
    pub fn new(limit: usize, space: &'a ParamSpace, objective: &'a dyn Objective) -> Self {
        Budget {
            limit,
            space,
            objective,
            trajectory: Vec::with_capacity(limit),
            best: None,
            started: Instant::now(),
            time_to_best: 0.0,
        }
    }

    pub fn used(&self) -> usize {
        self.trajectory.len()
    }

    pub fn remaining(&self) -> usize {
        self.limit - self.trajectory.len()
    }

    pub fn exhausted(&self) -> bool {
        self.remaining() == 0
    }

    pub fn best_cost(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.cost)
    }

    /// Evaluates as many of `batch` as the budget allows, in order, and
    /// returns their costs. Candidates are clamped into the box first.
    pub fn evaluate(&mut self, batch: &[Point]) -> Result<Vec<f64>, OptimizeError> {
        let n = batch.len().min(self.remaining());
        let points: Vec<Point> = batch[..n].iter().map(|p| self.space.clamp(p)).collect();
        let objective = self.objective;
        let outcomes = points.par_iter().map(|p| objective.evaluate(p)).collect::<Result<Vec<_>, _>>()?;
        let mut costs = Vec::with_capacity(n);
        for (raw, outcome) in points.into_iter().zip(outcomes) {
            let index = self.trajectory.len();
            if outcome.cost < self.best_cost() {
                self.best = Some(BestEntry {
                    index,
                    cost: outcome.cost,
                    raw,
                    config: self.space.decode(&raw)?,
                    metrics: outcome.metrics,
                });
                self.time_to_best = self.started.elapsed().as_secs_f64();
            }
            self.trajectory.push(TrajectoryPoint { index, cost: outcome.cost, raw });
            costs.push(outcome.cost);
        }
        Ok(costs)
    }

    pub fn evaluate_one(&mut self, point: &Point) -> Result<Option<f64>, OptimizeError> {
        Ok(self.evaluate(std::slice::from_ref(point))?.pop())
    }

    pub fn into_record(self, algorithm: Algorithm, seed: u64) -> RunRecord {
        RunRecord {
            algorithm,
            seed,
            budget: self.limit,
            objective: self.objective.name(),
            trajectory: self.trajectory,
            best: self.best.expect("budget of at least one evaluation"),
            time_to_best: self.time_to_best,
            total_time: self.started.elapsed().as_secs_f64(),
        }
    }
}
