//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::process::ExitCode;
use std::time::Instant;

use olsr_tune::fitness::{comm_cost, Evaluator, FitnessWeights};
use olsr_tune::netsim::{run_simulation, QosMetrics, Simulation};
use olsr_tune::olsr::{select_mprs, shortest_routes, NodeId, OlsrConfig};
use olsr_tune::optimizers::{optimize, Algorithm, Objective, OptimizerConfig, ParamSpace, Rastrigin, SimObjective, Sphere};
use olsr_tune::scenario::scenario_by_name;
use olsr_tune::stats::{friedman_mean_ranks, kruskal_wallis, mid_ranks, ResultMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn metrics(pdr: f64, nrl: f64, e2ed: f64) -> QosMetrics {
    QosMetrics { pdr, nrl, e2ed, rpl: 1.0, sent: 0, delivered: 0, dropped: 0, in_flight: 0, routing_tx: 0 }
}

fn fitness_arithmetic() -> Outcome {
    let cost = comm_cost(&metrics(1.0, 0.0271, 0.0156), &FitnessWeights::default()).expect("finite");
    let exact = (cost - -0.48974).abs() <= 1e-9;
    let near = (cost - -0.480).abs() <= 0.01;
    (exact && near, format!("cost {cost:.10}; |cost + 0.48974| <= 1e-9: {exact}; |cost + 0.480| <= 0.01: {near}"))
}

/// Smallest subset of `candidates` covering `targets`, by exhaustive search.
fn min_cover(candidates: &[u32], reach: &BTreeMap<u32, BTreeSet<u32>>, targets: &BTreeSet<u32>) -> usize {
    let mut best = usize::MAX;
    for mask in 0u32..(1 << candidates.len()) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let covered: BTreeSet<u32> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .flat_map(|(_, c)| reach[c].iter().copied())
            .collect();
        if targets.is_subset(&covered) {
            best = size;
        }
    }
    best
}

fn mpr_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let (mut covered_all, mut near_minimum) = (0, 0);
    let graphs = 500;
    for _ in 0..graphs {
        let n = rng.random_range(2..=8u32);
        let p: f64 = rng.random_range(0.2..0.8);
        let mut adj: BTreeMap<u32, BTreeSet<u32>> = (0..n).map(|i| (i, BTreeSet::new())).collect();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    adj.get_mut(&a).unwrap().insert(b);
                    adj.get_mut(&b).unwrap().insert(a);
                }
            }
        }
        let one_hop: Vec<u32> = adj[&0].iter().copied().collect();
        let neighbors: Vec<(NodeId, u8)> =
            one_hop.iter().map(|&v| (NodeId(v), if rng.random::<f64>() < 0.1 { 7 } else { rng.random_range(1..=6) })).collect();
        let two_hop: Vec<(NodeId, NodeId)> =
            one_hop.iter().flat_map(|&v| adj[&v].iter().filter(|&&w| w != 0).map(move |&w| (NodeId(v), NodeId(w)))).collect();
        let targets: BTreeSet<u32> = two_hop.iter().map(|(_, w)| w.0).filter(|w| !adj[&0].contains(w)).collect();
        let reach: BTreeMap<u32, BTreeSet<u32>> =
            one_hop.iter().map(|&v| (v, adj[&v].intersection(&targets).copied().collect())).collect();

        let sel = select_mprs(&neighbors, &two_hop);
        let mprs: BTreeSet<u32> = sel.mprs.iter().map(|m| m.0).collect();
        let covered: BTreeSet<u32> = mprs.iter().filter_map(|m| reach.get(m)).flatten().copied().collect();
        if mprs.iter().all(|m| reach.contains_key(m)) && targets.is_subset(&covered) && sel.uncoverable.is_empty() {
            covered_all += 1;
        }
        if mprs.len() <= min_cover(&one_hop, &reach, &targets) + 2 {
            near_minimum += 1;
        }
    }
    let share = f64::from(near_minimum) / f64::from(graphs);
    (
        covered_all == graphs,
        format!("full coverage {covered_all}/{graphs}; size <= minimum + 2 in {:.1}% (diagnostic, want >= 95%)", share * 100.0),
    )
}

fn bfs(adj: &[Vec<usize>], origin: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[origin] = Some(0);
    let mut queue = VecDeque::from([origin]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn routing_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let (mut entries, mut wrong) = (0usize, 0usize);
    for _ in 0..200 {
        let pos: Vec<(f64, f64)> = (0..20).map(|_| (rng.random_range(0.0..700.0), rng.random_range(0.0..700.0))).collect();
        let adj: Vec<Vec<usize>> = (0..20)
            .map(|a| {
                (0..20)
                    .filter(|&b| b != a && (pos[a].0 - pos[b].0).powi(2) + (pos[a].1 - pos[b].1).powi(2) <= 250.0 * 250.0)
                    .collect()
            })
            .collect();
        let edges: Vec<(NodeId, NodeId)> =
            adj.iter().enumerate().flat_map(|(a, out)| out.iter().map(move |&b| (NodeId(a as u32), NodeId(b as u32)))).collect();
        for origin in 0..20 {
            let neighbors: BTreeSet<NodeId> = adj[origin].iter().map(|&b| NodeId(b as u32)).collect();
            let routes = shortest_routes(NodeId(origin as u32), &neighbors, edges.iter().copied());
            let dist = bfs(&adj, origin);
            let reachable = dist.iter().enumerate().filter(|(d, x)| *d != origin && x.is_some()).count();
            if routes.len() != reachable {
                wrong += 1;
            }
            for (dest, route) in &routes {
                entries += 1;
                let nh = route.next_hop.0 as usize;
                let via_ok = adj[origin].contains(&nh) && bfs(&adj, nh)[dest.0 as usize] == Some(route.hops - 1);
                if dist[dest.0 as usize] != Some(route.hops) || !via_ok {
                    wrong += 1;
                }
            }
        }
    }
    (wrong == 0, format!("{entries} routing entries over 200 snapshots x 20 origins; {wrong} mismatches"))
}

fn determinism() -> Outcome {
    let scenario = scenario_by_name("base-malaga-like").expect("bundled");
    let config = OlsrConfig::rfc3626();
    let runs: Vec<QosMetrics> = (0..10).map(|_| run_simulation(&scenario, &config, 42).expect("runs")).collect();
    let metrics_same = runs.iter().all(|m| {
        m == &runs[0] && [m.pdr, m.nrl, m.e2ed, m.rpl].map(f64::to_bits) == [runs[0].pdr, runs[0].nrl, runs[0].e2ed, runs[0].rpl].map(f64::to_bits)
    });

    let space = ParamSpace::olsr();
    let records: Vec<_> = (0..10)
        .map(|_| {
            let evaluator = Evaluator::new(&scenario, FitnessWeights::default(), vec![7]).expect("seeds");
            let objective = SimObjective::new(evaluator);
            let cfg = OptimizerConfig::new(Algorithm::Pso, 5).with_budget(6).with_population(3);
            optimize(&cfg, &space, &objective).expect("optimizes")
        })
        .collect();
    let text_same = records.iter().all(|r| r.same_result(&records[0]) && r.trajectory.iter().zip(&records[0].trajectory).all(|(a, b)| a.cost.to_bits() == b.cost.to_bits()));
    (
        metrics_same && text_same,
        format!("10 simulations identical: {metrics_same}; 10 optimizer records identical: {text_same} (pdr {:.4})", runs[0].pdr),
    )
}

fn benchmark_separation() -> Outcome {
    let space = ParamSpace::olsr();
    let mut ok = true;
    let mut detail = Vec::new();
    let objectives: [(&str, &dyn Objective); 2] = [("sphere", &Sphere::default()), ("rastrigin", &Rastrigin::default())];
    for (name, objective) in objectives {
        let finals: BTreeMap<Algorithm, Vec<f64>> = Algorithm::ALL
            .into_iter()
            .map(|alg| {
                let costs = (0..30u64)
                    .map(|seed| {
                        let cfg = OptimizerConfig::new(alg, 1000 + seed).with_budget(1000);
                        optimize(&cfg, &space, objective).expect("optimizes").best.cost
                    })
                    .collect();
                (alg, costs)
            })
            .collect();
        let rand = &finals[&Algorithm::Rand];
        let rand_median = median(rand.clone());
        let mut parts = vec![format!("RAND {rand_median:.4}")];
        for alg in [Algorithm::Pso, Algorithm::De, Algorithm::Ga, Algorithm::Sa] {
            let m = median(finals[&alg].clone());
            let p = kruskal_wallis(&[finals[&alg].clone(), rand.clone()]).expect("groups").p_value;
            ok &= m < rand_median && p < 0.05;
            parts.push(format!("{alg} {m:.4} (p {p:.1e})"));
        }
        detail.push(format!("{name}: {}", parts.join(", ")));
    }
    (ok, detail.join("; "))
}

fn end_to_end_tuning() -> Outcome {
    let scenario = scenario_by_name("congested-small").expect("bundled");
    let weights = FitnessWeights::default();
    let evaluator = Evaluator::new(&scenario, weights, vec![1, 2, 3]).expect("seeds");
    let objective = SimObjective::new(evaluator);
    let cfg = OptimizerConfig::new(Algorithm::Pso, 2012).with_budget(200);
    let record = optimize(&cfg, &ParamSpace::olsr(), &objective).expect("optimizes");
    let tuned = record.best.config;

    let validation: Vec<u64> = (1001..=1005).collect();
    let score = |config: &OlsrConfig| -> (f64, f64) {
        let runs: Vec<QosMetrics> = validation.iter().map(|&s| run_simulation(&scenario, config, s).expect("runs")).collect();
        let costs = runs.iter().map(|m| comm_cost(m, &weights).expect("finite")).collect();
        (median(costs), median(runs.iter().map(|m| m.nrl).collect()))
    };
    let (tuned_cost, tuned_nrl) = score(&tuned);
    let (rfc_cost, rfc_nrl) = score(&OlsrConfig::rfc3626());
    (
        tuned_cost < rfc_cost && tuned_nrl < rfc_nrl,
        format!("validation medians: tuned cost {tuned_cost:.4} nrl {tuned_nrl:.4} vs rfc3626 cost {rfc_cost:.4} nrl {rfc_nrl:.4}"),
    )
}

fn sensitivity_direction() -> Outcome {
    let scenario = scenario_by_name("congested-small").expect("bundled");
    let rfc = OlsrConfig::rfc3626();
    let halved = OlsrConfig { hello_interval: rfc.hello_interval / 2.0, tc_interval: rfc.tc_interval / 2.0, ..rfc };
    let load = |c: &OlsrConfig| median((1..=5).map(|s| run_simulation(&scenario, c, s).expect("runs").routing_tx as f64).collect());
    let (base, fast) = (load(&rfc), load(&halved));
    (fast >= base, format!("median routing transmissions: rfc3626 {base} vs halved intervals {fast}"))
}

fn statistics_correctness() -> Outcome {
    let count_ranks = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|x| {
                let less = v.iter().filter(|y| *y < x).count() as f64;
                let eq = v.iter().filter(|y| *y == x).count() as f64;
                1.0 + less + (eq - 1.0) / 2.0
            })
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (b, k) = (rng.random_range(2..8), rng.random_range(2..6));
        let rows: Vec<Vec<f64>> = (0..b).map(|_| (0..k).map(|_| f64::from(rng.random_range(0..5u8))).collect()).collect();

        // Friedman in the rank-square form
        let ranks: Vec<Vec<f64>> = rows.iter().map(|r| count_ranks(r)).collect();
        let (bf, kf) = (b as f64, k as f64);
        let sums: Vec<f64> = (0..k).map(|j| ranks.iter().map(|r| r[j]).sum()).collect();
        let a1: f64 = ranks.iter().flatten().map(|r| r * r).sum();
        let c1 = bf * kf * (kf + 1.0).powi(2) / 4.0;
        let t = if a1 == c1 { 0.0 } else { (kf - 1.0) * sums.iter().map(|s| (s - bf * (kf + 1.0) / 2.0).powi(2)).sum::<f64>() / (a1 - c1) };
        let f = friedman_mean_ranks(&ResultMatrix::from_rows(rows.clone()).expect("valid"));
        worst = worst.max((f.statistic - t).abs());
        for (m, s) in f.mean_ranks.iter().zip(&sums) {
            worst = worst.max((m - s / bf).abs());
        }

        // Kruskal-Wallis over the columns as groups, rank-variance form
        let groups: Vec<Vec<f64>> = (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let pooled: Vec<f64> = groups.concat();
        let pr = count_ranks(&pooled);
        let n = pooled.len() as f64;
        let grand = (n + 1.0) / 2.0;
        let total: f64 = pr.iter().map(|r| (r - grand).powi(2)).sum();
        let between: f64 = pr.chunks(b).map(|c| c.len() as f64 * (c.iter().sum::<f64>() / c.len() as f64 - grand).powi(2)).sum();
        let h = if total == 0.0 { 0.0 } else { (n - 1.0) * between / total };
        let kw = kruskal_wallis(&groups).expect("groups");
        worst = worst.max((kw.statistic - h).abs());
        worst = worst.max((kw.p_value - chi2_sf(h, k - 1)).abs());
        worst = worst.max((f.p_value - chi2_sf(t, k - 1)).abs());
    }
    let flat = kruskal_wallis(&[vec![3.0; 4], vec![3.0; 4], vec![3.0; 2]]).expect("groups");
    let flat_f = friedman_mean_ranks(&ResultMatrix::from_rows(vec![vec![3.0; 4]; 3]).expect("valid"));
    let flat_ok = flat.statistic == 0.0
        && flat.p_value == 1.0
        && flat_f.statistic == 0.0
        && flat_f.p_value == 1.0
        && mid_ranks(&[1.0; 3]) == vec![2.0; 3];
    (worst <= 1e-9 && flat_ok, format!("max deviation {worst:.2e} over 20 matrices; all-equal H = {}, p = {}", flat.statistic, flat.p_value))
}

/// Chi-square upper tail by the even-df series or Simpson integration.
fn chi2_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if df.is_multiple_of(2) {
        let (mut term, mut sum) = (1.0, 1.0);
        for i in 1..df / 2 {
            term *= x / 2.0 / i as f64;
            sum += term;
        }
        return (-x / 2.0).exp() * sum;
    }
    let k = df as f64 / 2.0;
    let gamma: f64 = std::f64::consts::PI.sqrt() * (0..(df - 1) / 2).map(|i| i as f64 + 0.5).product::<f64>();
    let g = |u: f64| 2.0 * u.powf(2.0 * k - 1.0) * (-u * u / 2.0).exp() / (2f64.powf(k) * gamma);
    let (upper, steps) = (x.sqrt(), 20_000);
    let h = upper / steps as f64;
    let inner: f64 = (1..steps).map(|i| g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    1.0 - (g(0.0) + g(upper) + inner) * h / 3.0
}

fn expiry_semantics() -> Outcome {
    let scenario = scenario_by_name("static-mesh").expect("bundled");
    let silent = NodeId(2);
    let silence_at = 40.0;
    let mut ok = true;
    let mut detail = Vec::new();
    for (hello, seed) in [(1.0, 1), (2.0, 2), (4.0, 3)] {
        let config = OlsrConfig { hello_interval: hello, refresh_interval: hello, neighb_hold_time: 3.0 * hello, ..OlsrConfig::rfc3626() };
        let bound = config.neighb_hold_time + hello / 4.0;
        let mut sim = Simulation::new(&scenario, config, seed).expect("valid");
        sim.silence(silent, silence_at);
        sim.run_until(silence_at);
        let former: Vec<NodeId> =
            (0..5).map(NodeId).filter(|&n| n != silent && sim.node_state(n).is_symmetric_neighbor(silent)).collect();
        sim.run_until(silence_at + bound);
        let lingering = former.iter().filter(|&&n| sim.node_state(n).links().contains_key(&silent)).count();
        ok &= former.len() == 4 && lingering == 0;
        detail.push(format!("hello {hello}: {} former neighbors, {lingering} still linked after {bound:.2} s", former.len()));
    }
    (ok, detail.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("fitness arithmetic", fitness_arithmetic),
        ("MPR oracle", mpr_oracle),
        ("routing oracle", routing_oracle),
        ("determinism", determinism),
        ("benchmark separation", benchmark_separation),
        ("end-to-end tuning", end_to_end_tuning),
        ("sensitivity direction", sensitivity_direction),
        ("statistics correctness", statistics_correctness),
        ("expiry semantics", expiry_semantics),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check();
        failed += usize::from(!pass);
        println!(
            "{} [{}] {name}: {detail} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
