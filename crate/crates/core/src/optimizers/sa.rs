use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Budget, OptimizeError, OptimizerConfig, ParamSpace, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    /// Temperature multiplier applied once per epoch.
    pub decay: f64,
    /// Steps per epoch.
    pub epoch: usize,
    /// Neighbor standard deviation as a fraction of each range.
    pub step_fraction: f64,
    /// Initial acceptance rate targeted for uphill moves.
    pub initial_acceptance: f64,
    /// Upper bound on calibration probes, which count against the budget.
    pub probes: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams { decay: 0.8, epoch: 20, step_fraction: 0.1, initial_acceptance: 0.8, probes: 50 }
    }
}

/// Acceptance probability of a move that changes the cost by `delta`.
pub fn metropolis(delta: f64, temperature: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        (-delta / temperature).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaState {
    pub current: Point,
    pub current_cost: f64,
    pub temperature: f64,
    /// Steps taken so far, accepted or not.
    pub steps: usize,
}

impl SaState {
    pub fn new(current: Point, current_cost: f64, temperature: f64) -> Self {
        SaState { current, current_cost, temperature, steps: 0 }
    }

    /// Gaussian perturbation of the current point, clamped.
    pub fn propose<R: Rng + ?Sized>(&self, params: &SaParams, space: &ParamSpace, rng: &mut R) -> Point {
        neighbor(&self.current, params, space, rng)
    }

    /// Applies the Metropolis rule to an evaluated neighbor and advances the
    /// cooling schedule. Returns whether the move was accepted.
    pub fn step<R: Rng + ?Sized>(&mut self, candidate: Point, cost: f64, params: &SaParams, rng: &mut R) -> bool {
        let p = metropolis(cost - self.current_cost, self.temperature);
        let accepted = p >= 1.0 || rng.random::<f64>() < p;
        if accepted {
            self.current = candidate;
            self.current_cost = cost;
        }
        self.steps += 1;
        if self.steps.is_multiple_of(params.epoch) {
            self.temperature *= params.decay;
        }
        accepted
    }
}

fn neighbor<R: Rng + ?Sized>(x: &Point, params: &SaParams, space: &ParamSpace, rng: &mut R) -> Point {
    let moved: Point = std::array::from_fn(|d| {
        let sigma = params.step_fraction * space.dims()[d].range();
        x[d] + Normal::new(0.0, sigma).expect("positive sigma").sample(rng)
    });
    space.clamp(&moved)
}

/// Starting temperature at which the mean uphill move is accepted with the
/// target probability.
fn calibrate(uphill: &[f64], params: &SaParams) -> f64 {
    if uphill.is_empty() {
        return 1.0;
    }
    let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
    -mean / params.initial_acceptance.ln()
}

pub(super) fn run<R: Rng + ?Sized>(
    config: &OptimizerConfig,
    space: &ParamSpace,
    budget: &mut Budget<'_>,
    rng: &mut R,
) -> Result<(), OptimizeError> {
    let params = &config.sa;
    let start = space.sample(rng);
    let Some(start_cost) = budget.evaluate_one(&start)? else { return Ok(()) };

    let probes = params.probes.min(budget.remaining() / 4);
    let probe_points: Vec<Point> = (0..probes).map(|_| neighbor(&start, params, space, rng)).collect();
    let uphill: Vec<f64> =
        budget.evaluate(&probe_points)?.into_iter().map(|c| c - start_cost).filter(|&d| d > 0.0).collect();

    let mut state = SaState::new(start, start_cost, calibrate(&uphill, params));
    while !budget.exhausted() {
        let candidate = state.propose(params, space, rng);
        let Some(cost) = budget.evaluate_one(&candidate)? else { break };
        state.step(candidate, cost, params, rng);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn downhill_always_accepted() {
        assert_eq!(metropolis(-0.1, 1.0), 1.0);
        assert_eq!(metropolis(0.0, 1e-9), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = SaState::new([0.0; 8], 1.0, 1e-12);
        assert!(s.step([1.0; 8], 0.9, &SaParams::default(), &mut rng));
        assert_eq!(s.current_cost, 0.9);
    }

    #[test]
    fn uphill_probability() {
        assert!((metropolis(0.1, 1.0) - 0.904837418035960).abs() < 1e-12);
    }

    #[test]
    fn uphill_acceptance_frequency_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = SaParams { epoch: usize::MAX, ..SaParams::default() };
        let mut accepted = 0;
        let trials = 20_000;
        for _ in 0..trials {
            let mut s = SaState::new([0.0; 8], 0.0, 1.0);
            if s.step([0.0; 8], 0.1, &params, &mut rng) {
                accepted += 1;
            }
        }
        let rate = f64::from(accepted) / f64::from(trials);
        assert!((rate - (-0.1f64).exp()).abs() < 0.01, "{rate}");
    }

    #[test]
    fn cools_once_per_epoch() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut s = SaState::new([0.0; 8], 0.0, 1.0);
        let params = SaParams::default();
        for _ in 0..19 {
            s.step([0.0; 8], 0.0, &params, &mut rng);
        }
        assert_eq!(s.temperature, 1.0);
        s.step([0.0; 8], 0.0, &params, &mut rng);
        assert_eq!(s.temperature, 0.8);
    }

    #[test]
    fn calibrated_temperature_hits_target_rate() {
        let params = SaParams::default();
        let t = calibrate(&[0.2, 0.4], &params);
        assert!((metropolis(0.3, t) - 0.8).abs() < 1e-12);
        assert_eq!(calibrate(&[], &params), 1.0);
    }

    #[test]
    fn neighbors_stay_in_box() {
        let space = ParamSpace::olsr();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let corner = space.dims().map(|d| d.upper);
        for _ in 0..100 {
            assert!(space.contains(&neighbor(&corner, &SaParams::default(), &space, &mut rng)));
        }
    }
}
