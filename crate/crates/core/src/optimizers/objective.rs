use std::f64::consts::PI;

use super::{OptimizeError, ParamSpace, Point};
use crate::fitness::Evaluator;
use crate::netsim::QosMetrics;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub cost: f64,
    /// Present when the cost came from simulation.
    pub metrics: Option<QosMetrics>,
}

/// Something to minimize over the parameter box. Implementations must be
/// pure: equal inputs give equal outcomes.
pub trait Objective: Sync {
    fn evaluate(&self, raw: &Point) -> Result<Outcome, OptimizeError>;

    fn name(&self) -> String;
}

/// Communication cost of simulated runs.
pub struct SimObjective<'a> {
    evaluator: Evaluator<'a>,
}

impl<'a> SimObjective<'a> {
    pub fn new(evaluator: Evaluator<'a>) -> Self {
        SimObjective { evaluator }
    }

    pub fn evaluator(&self) -> &Evaluator<'a> {
        &self.evaluator
    }
}

impl Objective for SimObjective<'_> {
    fn evaluate(&self, raw: &Point) -> Result<Outcome, OptimizeError> {
        let ev = self.evaluator.evaluate(raw).map_err(|e| OptimizeError::Objective(e.to_string()))?;
        Ok(Outcome { cost: ev.cost, metrics: Some(ev.metrics) })
    }

    fn name(&self) -> String {
        format!("sim:{}", self.evaluator.scenario().name)
    }
}

/// Coordinates scaled by each dimension's range and shifted so the optimum
/// sits at `center`.
fn normalized(space: &ParamSpace, center: &Point, raw: &Point) -> Point {
    std::array::from_fn(|i| (raw[i] - center[i]) / space.dims()[i].range())
}

/// Places the optimum off-center, at 30% of each range.
fn default_center(space: &ParamSpace) -> Point {
    std::array::from_fn(|i| {
        let d = space.dims()[i];
        d.lower + 0.3 * d.range()
    })
}

/// Sum of squares over range-normalized coordinates. Minimum 0 at `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub space: ParamSpace,
    pub center: Point,
}

impl Default for Sphere {
    fn default() -> Self {
        let space = ParamSpace::olsr();
        Sphere { center: default_center(&space), space }
    }
}

impl Objective for Sphere {
    fn evaluate(&self, raw: &Point) -> Result<Outcome, OptimizeError> {
        let z = normalized(&self.space, &self.center, raw);
        Ok(Outcome { cost: z.iter().map(|v| v * v).sum(), metrics: None })
    }

    fn name(&self) -> String {
        "sphere".into()
    }
}

/// Rastrigin function with each range mapped onto a span of 10.24.
/// Minimum 0 at `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rastrigin {
    pub space: ParamSpace,
    pub center: Point,
}

impl Default for Rastrigin {
    fn default() -> Self {
        let space = ParamSpace::olsr();
        Rastrigin { center: default_center(&space), space }
    }
}

impl Objective for Rastrigin {
    fn evaluate(&self, raw: &Point) -> Result<Outcome, OptimizeError> {
        let cost = normalized(&self.space, &self.center, raw)
            .iter()
            .map(|&u| {
                let z = 10.24 * u;
                z * z - 10.0 * (2.0 * PI * z).cos() + 10.0
            })
            .sum();
        Ok(Outcome { cost, metrics: None })
    }

    fn name(&self) -> String {
        "rastrigin".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmarks_vanish_at_center() {
        let s = Sphere::default();
        assert_eq!(s.evaluate(&s.center).unwrap().cost, 0.0);
        let r = Rastrigin::default();
        assert!(r.evaluate(&r.center).unwrap().cost.abs() < 1e-12);
    }

    #[test]
    fn sphere_at_a_corner() {
        let s = Sphere::default();
        let lower: Point = s.space.dims().map(|d| d.lower);
        // each coordinate is 0.3 of its range away
        assert!((s.evaluate(&lower).unwrap().cost - 8.0 * 0.09).abs() < 1e-12);
    }

    #[test]
    fn rastrigin_has_local_minima_off_center() {
        let r = Rastrigin::default();
        let mut p = r.center;
        // one unit in normalized z along the first axis
        p[0] += r.space.dims()[0].range() / 10.24;
        let at_one = r.evaluate(&p).unwrap().cost;
        assert!((at_one - 1.0).abs() < 1e-9);
        p[0] -= r.space.dims()[0].range() / 20.48;
        assert!(r.evaluate(&p).unwrap().cost > at_one);
    }
}
