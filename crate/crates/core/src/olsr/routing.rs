use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{IfaceAddr, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub next_hop: NodeId,
    pub hops: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoutingTable {
    pub routes: BTreeMap<NodeId, Route>,
    /// Routes to secondary interface addresses, inherited from their main node.
    pub interface_routes: BTreeMap<IfaceAddr, Route>,
}

impl RoutingTable {
    pub fn get(&self, dest: NodeId) -> Option<&Route> {
        self.routes.get(&dest)
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }
}

/// Minimum-hop routes from `origin`.
///
/// `neighbors` are the symmetric one-hop neighbors; `edges` are directed
/// (from, to) pairs learned from the two-hop set and topology tuples.
/// Among equal-length paths the lowest next-hop id wins.
pub fn shortest_routes(
    origin: NodeId,
    neighbors: &BTreeSet<NodeId>,
    edges: impl IntoIterator<Item = (NodeId, NodeId)>,
) -> BTreeMap<NodeId, Route> {
    let mut adjacency: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (from, to) in edges {
        adjacency.entry(from).or_default().push(to);
    }

    let mut routes = BTreeMap::new();
    let mut frontier: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for &n in neighbors {
        if n != origin {
            frontier.insert(n, n);
        }
    }
    let mut hops = 1;
    while !frontier.is_empty() {
        for (&node, &next_hop) in &frontier {
            routes.insert(node, Route { next_hop, hops });
        }
        let mut next: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for (&node, &next_hop) in &frontier {
            let Some(out) = adjacency.get(&node) else { continue };
            for &to in out {
                if to == origin || routes.contains_key(&to) {
                    continue;
                }
                next.entry(to)
                    .and_modify(|nh| *nh = (*nh).min(next_hop))
                    .or_insert(next_hop);
            }
        }
        frontier = next;
        hops += 1;
    }
    routes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn chain_routes() {
        // A=0 - B=1 - C=2 - D=3 seen from A
        let routes = shortest_routes(n(0), &BTreeSet::from([n(1)]), [(n(1), n(2)), (n(2), n(3))]);
        assert_eq!(routes[&n(1)], Route { next_hop: n(1), hops: 1 });
        assert_eq!(routes[&n(2)], Route { next_hop: n(1), hops: 2 });
        assert_eq!(routes[&n(3)], Route { next_hop: n(1), hops: 3 });
    }

    #[test]
    fn disconnected_node_absent() {
        let routes = shortest_routes(n(0), &BTreeSet::from([n(1)]), [(n(5), n(6))]);
        assert_eq!(routes.len(), 1);
        assert!(!routes.contains_key(&n(6)));
    }

    #[test]
    fn ties_pick_lowest_next_hop() {
        // two equal paths to 9 via 4 and via 2
        let routes = shortest_routes(n(0), &BTreeSet::from([n(4), n(2)]), [(n(4), n(9)), (n(2), n(9))]);
        assert_eq!(routes[&n(9)], Route { next_hop: n(2), hops: 2 });
    }

    #[test]
    fn edges_back_to_origin_are_ignored() {
        let routes = shortest_routes(n(0), &BTreeSet::from([n(1)]), [(n(1), n(0))]);
        assert!(!routes.contains_key(&n(0)));
    }
}
