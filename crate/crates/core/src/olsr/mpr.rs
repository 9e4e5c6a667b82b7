//! Multipoint relay selection.
//!
//! Greedy set cover over the strict two-hop neighborhood. Neighbors with
//! willingness [`WILL_ALWAYS`] are always relays, neighbors with
//! [`WILL_NEVER`] never are. Remaining targets are covered first by their
//! sole possible relay, then by repeatedly taking the neighbor that covers
//! the most uncovered targets (ties: higher willingness, then lower id).

use std::collections::{BTreeMap, BTreeSet};

use super::config::{WILL_ALWAYS, WILL_NEVER};
use super::NodeId;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MprSelection {
    pub mprs: BTreeSet<NodeId>,
    /// Two-hop targets reachable only through neighbors that refuse to relay.
    pub uncoverable: BTreeSet<NodeId>,
}

/// Selects relays among `symmetric_neighbors` (id, willingness) so that every
/// target in `two_hop` (via, target) is covered.
///
/// Entries whose target is itself a symmetric neighbor are not strict two-hop
/// neighbors and are ignored, as are entries whose via is not listed among
/// the symmetric neighbors. Callers must strip the selecting node itself
/// from the targets.
pub fn select_mprs(symmetric_neighbors: &[(NodeId, u8)], two_hop: &[(NodeId, NodeId)]) -> MprSelection {
    let willingness: BTreeMap<NodeId, u8> = symmetric_neighbors.iter().copied().collect();

    // target -> relays able to reach it
    let mut covers: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    // relay -> targets it reaches
    let mut reach: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    let mut strict_targets = BTreeSet::new();
    for &(via, target) in two_hop {
        let Some(&will) = willingness.get(&via) else { continue };
        if willingness.contains_key(&target) {
            continue;
        }
        strict_targets.insert(target);
        if will == WILL_NEVER {
            continue;
        }
        covers.entry(target).or_default().insert(via);
        reach.entry(via).or_default().insert(target);
    }

    let mut selection = MprSelection {
        uncoverable: strict_targets.iter().filter(|t| !covers.contains_key(t)).copied().collect(),
        ..Default::default()
    };

    for (&id, &will) in &willingness {
        if will == WILL_ALWAYS {
            selection.mprs.insert(id);
        }
    }

    let mut uncovered: BTreeSet<NodeId> = covers
        .keys()
        .filter(|t| !selection.mprs.iter().any(|m| reach.get(m).is_some_and(|r| r.contains(t))))
        .copied()
        .collect();

    for (target, relays) in &covers {
        if relays.len() == 1 && uncovered.contains(target) {
            let sole = *relays.iter().next().unwrap();
            selection.mprs.insert(sole);
            for t in &reach[&sole] {
                uncovered.remove(t);
            }
        }
    }

    while !uncovered.is_empty() {
        let best = reach
            .iter()
            .filter(|(id, _)| !selection.mprs.contains(id))
            .map(|(&id, targets)| (id, targets.intersection(&uncovered).count()))
            .filter(|&(_, gain)| gain > 0)
            .max_by(|a, b| {
                a.1.cmp(&b.1)
                    .then(willingness[&a.0].cmp(&willingness[&b.0]))
                    .then(b.0.cmp(&a.0))
            });
        let Some((id, _)) = best else { break };
        selection.mprs.insert(id);
        for t in &reach[&id] {
            uncovered.remove(t);
        }
    }

    selection
}
