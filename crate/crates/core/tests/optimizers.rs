use olsr_tune::fitness::{Evaluator, FitnessWeights};
use olsr_tune::optimizers::{optimize, Algorithm, OptimizerConfig, ParamSpace, Rastrigin, RunRecord, SimObjective, Sphere};
use olsr_tune::scenario::scenario_by_name;
use proptest::prelude::*;

fn run(alg: Algorithm, seed: u64, budget: usize) -> RunRecord {
    optimize(&OptimizerConfig::new(alg, seed).with_budget(budget), &ParamSpace::olsr(), &Rastrigin::default()).unwrap()
}

#[test]
fn same_seed_same_record() {
    for alg in Algorithm::ALL {
        let a = run(alg, 21, 150);
        let b = run(alg, 21, 150);
        assert!(a.same_result(&b), "{alg}");
        assert!(!a.same_result(&run(alg, 22, 150)), "{alg}");
    }
}

#[test]
fn records_survive_the_text_format() {
    for alg in Algorithm::ALL {
        let r = run(alg, 3, 40);
        assert_eq!(RunRecord::parse(&r.to_text()).unwrap(), r);
    }
}

#[test]
fn simulation_objective_spends_one_run_per_seed_and_candidate() {
    let scenario = scenario_by_name("static-mesh").unwrap();
    let evaluator = Evaluator::new(&scenario, FitnessWeights::default(), vec![1, 2]).unwrap();
    let objective = SimObjective::new(evaluator);
    let cfg = OptimizerConfig::new(Algorithm::De, 8).with_budget(12).with_population(4);
    let rec = optimize(&cfg, &ParamSpace::olsr(), &objective).unwrap();
    assert_eq!(rec.trajectory.len(), 12);
    assert_eq!(objective.evaluator().evaluations(), 24);
    assert_eq!(rec.objective, "sim:static-mesh");
    let m = rec.best.metrics.expect("simulation metrics kept");
    assert!((0.0..=1.0).contains(&m.pdr));
    assert!(rec.best.config.validate().is_ok());
}

#[test]
fn metaheuristics_beat_random_search_on_sphere() {
    let median = |alg| {
        let mut v: Vec<f64> = (0..9)
            .map(|s| optimize(&OptimizerConfig::new(alg, s).with_budget(600), &ParamSpace::olsr(), &Sphere::default()).unwrap().best.cost)
            .collect();
        v.sort_by(f64::total_cmp);
        v[4]
    };
    let rand = median(Algorithm::Rand);
    for alg in [Algorithm::Pso, Algorithm::De, Algorithm::Ga, Algorithm::Sa] {
        assert!(median(alg) < rand, "{alg}");
    }
}

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop::sample::select(Algorithm::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn budget_is_spent_exactly(alg in algorithm(), budget in 10usize..260, seed in any::<u64>()) {
        let r = run(alg, seed, budget);
        prop_assert_eq!(r.trajectory.len(), budget);
        prop_assert!(r.trajectory.iter().enumerate().all(|(i, p)| p.index == i));
    }

    #[test]
    fn best_matches_trajectory(alg in algorithm(), budget in 10usize..200, seed in any::<u64>()) {
        let r = run(alg, seed, budget);
        let bsf = r.best_so_far();
        prop_assert!(bsf.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*bsf.last().unwrap(), r.best.cost);
        let at = &r.trajectory[r.best.index];
        prop_assert_eq!(at.cost, r.best.cost);
        prop_assert_eq!(at.raw, r.best.raw);
        // the first occurrence of the minimum is reported
        prop_assert!(r.trajectory[..r.best.index].iter().all(|p| p.cost > r.best.cost));
        let space = ParamSpace::olsr();
        prop_assert!(r.trajectory.iter().all(|p| space.contains(&p.raw)));
    }
}
