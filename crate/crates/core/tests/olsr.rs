use std::collections::{BTreeMap, BTreeSet, VecDeque};

use olsr_tune::olsr::{select_mprs, shortest_routes, ControlMessage, NodeId, NodeState, OlsrConfig, WILL_ALWAYS, WILL_NEVER};
use proptest::prelude::*;

fn bfs(adj: &[BTreeSet<usize>], origin: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[origin] = Some(0);
    let mut q = VecDeque::from([origin]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

fn graph(n: usize, bits: &[bool]) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if bits[k % bits.len()] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
            k += 1;
        }
    }
    adj
}

/// Lossless synchronous exchange: every node sends a HELLO each round and a
/// TC every other round; TCs are flooded through the relays the protocol
/// chooses.
fn converge(adj: &[BTreeSet<usize>], rounds: usize) -> Vec<NodeState> {
    let config = OlsrConfig::rfc3626();
    let mut nodes: Vec<NodeState> = (0..adj.len()).map(|i| NodeState::new(NodeId(i as u32), config)).collect();
    for round in 0..rounds {
        let now = round as f64;
        let hellos: Vec<ControlMessage> = nodes.iter_mut().map(NodeState::make_hello).collect();
        for (from, msg) in hellos.iter().enumerate() {
            for &to in &adj[from] {
                nodes[to].process_message(msg, NodeId(from as u32), now).unwrap();
            }
        }
        if round % 2 == 1 {
            let mut queue: VecDeque<(usize, ControlMessage)> =
                nodes.iter_mut().enumerate().filter_map(|(i, n)| n.make_tc().map(|m| (i, m))).collect();
            while let Some((from, msg)) = queue.pop_front() {
                for &to in &adj[from] {
                    if let Some(fwd) = nodes[to].process_message(&msg, NodeId(from as u32), now).unwrap() {
                        queue.push_back((to, fwd));
                    }
                }
            }
        }
    }
    nodes
}

#[test]
fn protocol_routes_on_a_ring_are_shortest() {
    let n = 9;
    let adj: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([(i + 1) % n, (i + n - 1) % n])).collect();
    let nodes = converge(&adj, 12);
    for (i, node) in nodes.iter().enumerate() {
        let dist = bfs(&adj, i);
        for j in (0..n).filter(|&j| j != i) {
            assert_eq!(node.routing_table().get(NodeId(j as u32)).map(|r| r.hops), dist[j], "{i} -> {j}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_relays_cover_every_coverable_target(
        n in 2usize..9,
        bits in prop::collection::vec(any::<bool>(), 28),
        wills in prop::collection::vec(0u8..=7, 8),
    ) {
        let adj = graph(n, &bits);
        let neighbors: Vec<(NodeId, u8)> = adj[0].iter().map(|&v| (NodeId(v as u32), wills[v])).collect();
        let two_hop: Vec<(NodeId, NodeId)> = adj[0]
            .iter()
            .flat_map(|&v| adj[v].iter().filter(|&&w| w != 0).map(move |&w| (NodeId(v as u32), NodeId(w as u32))))
            .collect();
        let sel = select_mprs(&neighbors, &two_hop);

        let strict: BTreeSet<usize> = two_hop.iter().map(|(_, w)| w.0 as usize).filter(|w| !adj[0].contains(w)).collect();
        let relaying = |v: usize| wills[v] != WILL_NEVER;
        for &m in &sel.mprs {
            let v = m.0 as usize;
            prop_assert!(adj[0].contains(&v) && relaying(v));
        }
        for &v in &adj[0] {
            if wills[v] == WILL_ALWAYS {
                prop_assert!(sel.mprs.contains(&NodeId(v as u32)));
            }
        }
        for &t in &strict {
            let coverable = adj[0].iter().any(|&v| relaying(v) && adj[v].contains(&t));
            let covered = sel.mprs.iter().any(|m| adj[m.0 as usize].contains(&t));
            prop_assert_eq!(coverable, covered, "target {}", t);
            prop_assert_eq!(!coverable, sel.uncoverable.contains(&NodeId(t as u32)));
        }
    }

    #[test]
    fn route_hops_equal_bfs_distance(n in 2usize..16, bits in prop::collection::vec(prop::bool::weighted(0.25), 120)) {
        let adj = graph(n, &bits);
        let edges: Vec<(NodeId, NodeId)> =
            adj.iter().enumerate().flat_map(|(a, out)| out.iter().map(move |&b| (NodeId(a as u32), NodeId(b as u32)))).collect();
        for origin in 0..n {
            let neighbors: BTreeSet<NodeId> = adj[origin].iter().map(|&b| NodeId(b as u32)).collect();
            let routes: BTreeMap<NodeId, _> = shortest_routes(NodeId(origin as u32), &neighbors, edges.iter().copied());
            let dist = bfs(&adj, origin);
            for (j, d) in dist.iter().enumerate().filter(|(j, _)| *j != origin) {
                prop_assert_eq!(routes.get(&NodeId(j as u32)).map(|r| r.hops), *d);
            }
            for (dest, r) in &routes {
                // the next hop is a neighbor one step closer, and the lowest such id
                let closer: Vec<usize> = adj[origin]
                    .iter()
                    .copied()
                    .filter(|&v| bfs(&adj, v)[dest.0 as usize] == Some(r.hops - 1))
                    .collect();
                prop_assert_eq!(Some(r.next_hop.0 as usize), closer.first().copied());
            }
        }
    }

    #[test]
    fn converged_protocol_state_routes_shortest(n in 2usize..9, bits in prop::collection::vec(prop::bool::weighted(0.4), 28)) {
        let adj = graph(n, &bits);
        let nodes = converge(&adj, 10);
        for (i, node) in nodes.iter().enumerate() {
            let dist = bfs(&adj, i);
            for j in (0..n).filter(|&j| j != i) {
                prop_assert_eq!(node.routing_table().get(NodeId(j as u32)).map(|r| r.hops), dist[j]);
            }
        }
    }
}
