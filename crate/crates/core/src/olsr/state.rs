use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};

use super::message::{ControlMessage, LinkCode, MessageKind, Payload, FLOOD_TTL};
use super::mpr::{select_mprs, MprSelection};
use super::routing::{shortest_routes, RoutingTable};
use super::{IfaceAddr, NodeId, OlsrConfig, OlsrError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkStatus {
    Asymmetric,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTuple {
    pub status: LinkStatus,
    pub expiry: f64,
    /// Willingness the neighbor advertised in its last HELLO.
    pub willingness: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyTuple {
    pub seq: u32,
    pub expiry: f64,
}

/// Per-node OLSR protocol state.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    self_id: NodeId,
    config: OlsrConfig,
    own_interfaces: Vec<IfaceAddr>,
    links: BTreeMap<NodeId, LinkTuple>,
    /// (via neighbor, two-hop node) -> expiry
    two_hop: BTreeMap<(NodeId, NodeId), f64>,
    /// Derived from links and two-hop tuples on first use after a change.
    selection: OnceCell<MprSelection>,
    mpr_selectors: BTreeMap<NodeId, f64>,
    /// (destination, last hop) -> tuple
    topology: BTreeMap<(NodeId, NodeId), TopologyTuple>,
    /// Highest TC sequence number accepted per originator. Never purged.
    topology_seq: BTreeMap<NodeId, u32>,
    duplicates: BTreeMap<(NodeId, MessageKind, u32), f64>,
    /// interface address -> (main node, expiry)
    interface_assoc: BTreeMap<IfaceAddr, (NodeId, f64)>,
    routing: OnceCell<RoutingTable>,
    next_seq: [u32; 3],
    /// Never above the earliest tuple expiry; exact after a purge.
    expiry_floor: f64,
}

impl NodeState {
    pub fn new(self_id: NodeId, config: OlsrConfig) -> Self {
        NodeState {
            self_id,
            config,
            own_interfaces: Vec::new(),
            links: BTreeMap::new(),
            two_hop: BTreeMap::new(),
            selection: OnceCell::new(),
            mpr_selectors: BTreeMap::new(),
            topology: BTreeMap::new(),
            topology_seq: BTreeMap::new(),
            duplicates: BTreeMap::new(),
            interface_assoc: BTreeMap::new(),
            routing: OnceCell::new(),
            next_seq: [0; 3],
            expiry_floor: f64::INFINITY,
        }
    }

    /// Declares secondary interfaces; such nodes emit MID messages.
    pub fn with_interfaces(mut self, interfaces: Vec<IfaceAddr>) -> Self {
        self.own_interfaces = interfaces;
        self
    }

    pub fn id(&self) -> NodeId {
        self.self_id
    }

    pub fn config(&self) -> &OlsrConfig {
        &self.config
    }

    pub fn links(&self) -> &BTreeMap<NodeId, LinkTuple> {
        &self.links
    }

    pub fn two_hop(&self) -> &BTreeMap<(NodeId, NodeId), f64> {
        &self.two_hop
    }

    pub fn mprs(&self) -> &BTreeSet<NodeId> {
        &self.selection().mprs
    }

    pub fn uncoverable(&self) -> &BTreeSet<NodeId> {
        &self.selection().uncoverable
    }

    pub fn mpr_selectors(&self) -> &BTreeMap<NodeId, f64> {
        &self.mpr_selectors
    }

    pub fn topology(&self) -> &BTreeMap<(NodeId, NodeId), TopologyTuple> {
        &self.topology
    }

    pub fn topology_seq(&self, originator: NodeId) -> Option<u32> {
        self.topology_seq.get(&originator).copied()
    }

    pub fn duplicates(&self) -> &BTreeMap<(NodeId, MessageKind, u32), f64> {
        &self.duplicates
    }

    pub fn interface_assoc(&self) -> &BTreeMap<IfaceAddr, (NodeId, f64)> {
        &self.interface_assoc
    }

    pub fn routing_table(&self) -> &RoutingTable {
        self.routing.get_or_init(|| self.compute_routes())
    }

    pub fn symmetric_neighbors(&self) -> BTreeSet<NodeId> {
        self.links
            .iter()
            .filter(|(_, l)| l.status == LinkStatus::Symmetric)
            .map(|(&id, _)| id)
            .collect()
    }

    pub fn is_symmetric_neighbor(&self, id: NodeId) -> bool {
        self.links.get(&id).is_some_and(|l| l.status == LinkStatus::Symmetric)
    }

    /// Strict two-hop neighbors: reachable through a symmetric neighbor,
    /// neither self nor a symmetric neighbor.
    pub fn strict_two_hop(&self) -> BTreeSet<NodeId> {
        let sym = self.symmetric_neighbors();
        self.two_hop
            .keys()
            .filter(|(via, target)| sym.contains(via) && *target != self.self_id && !sym.contains(target))
            .map(|&(_, target)| target)
            .collect()
    }

    /// Time by which the earliest tuple may expire. A lower bound that is
    /// exact right after [`purge_expired`](Self::purge_expired).
    pub fn next_expiry(&self) -> Option<f64> {
        self.expiry_floor.is_finite().then_some(self.expiry_floor)
    }

    fn exact_next_expiry(&self) -> Option<f64> {
        let links = self.links.values().map(|l| l.expiry);
        let two_hop = self.two_hop.values().copied();
        let selectors = self.mpr_selectors.values().copied();
        let topology = self.topology.values().map(|t| t.expiry);
        let dups = self.duplicates.values().copied();
        let ifaces = self.interface_assoc.values().map(|&(_, e)| e);
        links
            .chain(two_hop)
            .chain(selectors)
            .chain(topology)
            .chain(dups)
            .chain(ifaces)
            .min_by(f64::total_cmp)
    }

    /// Handles one received control message. Returns the copy to retransmit
    /// when this node must relay it.
    pub fn process_message(
        &mut self,
        msg: &ControlMessage,
        sender: NodeId,
        now: f64,
    ) -> Result<Option<ControlMessage>, OlsrError> {
        let kind = msg.kind()?;
        if msg.originator == self.self_id {
            return Ok(None);
        }
        self.purge_expired(now);
        match (&msg.payload, kind) {
            (Payload::Hello { willingness, neighbors }, _) => {
                self.process_hello(sender, *willingness, neighbors, now);
                Ok(None)
            }
            (_, MessageKind::Tc | MessageKind::Mid) => {
                // information must come over a symmetric link
                if !self.is_symmetric_neighbor(sender) {
                    return Ok(None);
                }
                match &msg.payload {
                    Payload::Tc { selectors } => self.process_tc(msg, selectors, now),
                    Payload::Mid { interfaces } => self.process_mid(msg, interfaces, now),
                    _ => unreachable!("kind derived from payload"),
                }
                Ok(self.forward_decision(msg, kind, sender, now))
            }
            _ => unreachable!("hello payload handled above"),
        }
    }

    fn process_hello(&mut self, sender: NodeId, willingness: u8, neighbors: &[(NodeId, LinkCode)], now: f64) {
        let expiry = now + self.config.neighb_hold_time;
        self.expiry_floor = self.expiry_floor.min(expiry);
        let self_code = neighbors.iter().find(|(id, _)| *id == self.self_id).map(|&(_, c)| c);
        let status = if self_code.is_some() { LinkStatus::Symmetric } else { LinkStatus::Asymmetric };

        let prev = self.links.insert(sender, LinkTuple { status, expiry, willingness });
        let mut neighborhood_changed = prev.is_none_or(|p| p.status != status || p.willingness != willingness);

        let advertised: BTreeSet<NodeId> = if status == LinkStatus::Symmetric {
            neighbors
                .iter()
                .filter(|(id, code)| code.is_symmetric() && *id != self.self_id)
                .map(|&(id, _)| id)
                .collect()
        } else {
            BTreeSet::new()
        };
        let withdrawn: Vec<(NodeId, NodeId)> = self
            .two_hop
            .range((sender, NodeId(0))..=(sender, NodeId(u32::MAX)))
            .map(|(&key, _)| key)
            .filter(|(_, target)| !advertised.contains(target))
            .collect();
        neighborhood_changed |= !withdrawn.is_empty();
        for key in withdrawn {
            self.two_hop.remove(&key);
        }
        for target in advertised {
            if self.two_hop.insert((sender, target), expiry).is_none() {
                neighborhood_changed = true;
            }
        }

        let selected_us = status == LinkStatus::Symmetric && self_code == Some(LinkCode::MprSelected);
        if selected_us {
            self.mpr_selectors.insert(sender, expiry);
        } else {
            self.mpr_selectors.remove(&sender);
        }

        if neighborhood_changed {
            self.selection.take();
            self.routing.take();
        }
    }

    fn process_tc(&mut self, msg: &ControlMessage, selectors: &[NodeId], now: f64) {
        let last_hop = msg.originator;
        if self.topology_seq.get(&last_hop).is_some_and(|&stored| msg.sequence_number <= stored) {
            return;
        }
        self.topology_seq.insert(last_hop, msg.sequence_number);
        let expiry = now + msg.validity_time;
        self.expiry_floor = self.expiry_floor.min(expiry);
        let old: BTreeSet<NodeId> = self.topology.keys().filter(|(_, l)| *l == last_hop).map(|&(d, _)| d).collect();
        self.topology.retain(|&(_, l), _| l != last_hop);
        let new: BTreeSet<NodeId> = selectors.iter().copied().collect();
        for &dest in &new {
            self.topology.insert((dest, last_hop), TopologyTuple { seq: msg.sequence_number, expiry });
        }
        if old != new {
            self.routing.take();
        }
    }

    fn process_mid(&mut self, msg: &ControlMessage, interfaces: &[IfaceAddr], now: f64) {
        let expiry = now + msg.validity_time;
        self.expiry_floor = self.expiry_floor.min(expiry);
        let mut changed = false;
        for &addr in interfaces {
            let prev = self.interface_assoc.insert(addr, (msg.originator, expiry));
            changed |= prev.is_none_or(|(main, _)| main != msg.originator);
        }
        if changed {
            self.routing.take();
        }
    }

    fn forward_decision(&mut self, msg: &ControlMessage, kind: MessageKind, sender: NodeId, now: f64) -> Option<ControlMessage> {
        let key = (msg.originator, kind, msg.sequence_number);
        let forward =
            !self.duplicates.contains_key(&key) && msg.ttl > 1 && self.mpr_selectors.contains_key(&sender);
        if forward {
            let expiry = now + self.config.dup_hold_time;
            self.expiry_floor = self.expiry_floor.min(expiry);
            self.duplicates.insert(key, expiry);
            Some(msg.forwarded())
        } else {
            None
        }
    }

    /// Drops every tuple with `expiry < now`. Returns whether anything was removed.
    pub fn purge_expired(&mut self, now: f64) -> bool {
        if self.expiry_floor >= now {
            return false;
        }
        let mut neighborhood = false;
        let mut topology = false;

        let before = self.links.len();
        self.links.retain(|_, l| l.expiry >= now);
        if self.links.len() != before {
            neighborhood = true;
            let links = &self.links;
            self.two_hop.retain(|(via, _), _| links.contains_key(via));
            self.mpr_selectors.retain(|id, _| links.contains_key(id));
        }
        let before = self.two_hop.len();
        self.two_hop.retain(|_, &mut e| e >= now);
        neighborhood |= self.two_hop.len() != before;

        let before = self.mpr_selectors.len();
        self.mpr_selectors.retain(|_, &mut e| e >= now);
        let selectors = self.mpr_selectors.len() != before;

        let before = self.topology.len();
        self.topology.retain(|_, t| t.expiry >= now);
        topology |= self.topology.len() != before;

        let before = self.interface_assoc.len();
        self.interface_assoc.retain(|_, &mut (_, e)| e >= now);
        topology |= self.interface_assoc.len() != before;

        let before = self.duplicates.len();
        self.duplicates.retain(|_, &mut e| e >= now);
        let dups = self.duplicates.len() != before;

        if neighborhood {
            self.selection.take();
        }
        if neighborhood || topology {
            self.routing.take();
        }
        self.expiry_floor = self.exact_next_expiry().unwrap_or(f64::INFINITY);
        neighborhood || topology || selectors || dups
    }

    fn selection(&self) -> &MprSelection {
        self.selection.get_or_init(|| self.compute_mprs())
    }

    fn compute_mprs(&self) -> MprSelection {
        let sym: Vec<(NodeId, u8)> = self
            .links
            .iter()
            .filter(|(_, l)| l.status == LinkStatus::Symmetric)
            .map(|(&id, l)| (id, l.willingness))
            .collect();
        let two_hop: Vec<(NodeId, NodeId)> =
            self.two_hop.keys().filter(|(_, target)| *target != self.self_id).copied().collect();
        select_mprs(&sym, &two_hop)
    }

    fn compute_routes(&self) -> RoutingTable {
        let neighbors = self.symmetric_neighbors();
        let edges = self
            .two_hop
            .keys()
            .filter(|(via, _)| neighbors.contains(via))
            .copied()
            .chain(self.topology.keys().map(|&(dest, last)| (last, dest)));
        let routes = shortest_routes(self.self_id, &neighbors, edges);
        let interface_routes = self
            .interface_assoc
            .iter()
            .filter_map(|(&addr, &(main, _))| routes.get(&main).map(|&r| (addr, r)))
            .collect();
        RoutingTable { routes, interface_routes }
    }

    fn take_seq(&mut self, kind: MessageKind) -> u32 {
        let slot = &mut self.next_seq[usize::from(kind.code() - 1)];
        let seq = *slot;
        *slot += 1;
        seq
    }

    pub fn make_hello(&mut self) -> ControlMessage {
        let neighbors = self
            .links
            .iter()
            .map(|(&id, l)| {
                let code = if self.mprs().contains(&id) {
                    LinkCode::MprSelected
                } else if l.status == LinkStatus::Symmetric {
                    LinkCode::Symmetric
                } else {
                    LinkCode::Asymmetric
                };
                (id, code)
            })
            .collect();
        ControlMessage {
            originator: self.self_id,
            sequence_number: self.take_seq(MessageKind::Hello),
            validity_time: self.config.neighb_hold_time,
            ttl: 1,
            hop_count: 0,
            payload: Payload::Hello { willingness: self.config.willingness, neighbors },
        }
    }

    /// TC advertising the MPR selector set; `None` when nobody selected us.
    pub fn make_tc(&mut self) -> Option<ControlMessage> {
        if self.mpr_selectors.is_empty() {
            return None;
        }
        let selectors = self.mpr_selectors.keys().copied().collect();
        Some(ControlMessage {
            originator: self.self_id,
            sequence_number: self.take_seq(MessageKind::Tc),
            validity_time: self.config.top_hold_time,
            ttl: FLOOD_TTL,
            hop_count: 0,
            payload: Payload::Tc { selectors },
        })
    }

    /// MID declaring secondary interfaces; `None` for single-interface nodes.
    pub fn make_mid(&mut self) -> Option<ControlMessage> {
        if self.own_interfaces.is_empty() {
            return None;
        }
        Some(ControlMessage {
            originator: self.self_id,
            sequence_number: self.take_seq(MessageKind::Mid),
            validity_time: self.config.mid_hold_time,
            ttl: FLOOD_TTL,
            hop_count: 0,
            payload: Payload::Mid { interfaces: self.own_interfaces.clone() },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn hello(from: u32, neighbors: &[(u32, LinkCode)]) -> ControlMessage {
        ControlMessage {
            originator: n(from),
            sequence_number: 0,
            validity_time: 6.0,
            ttl: 1,
            hop_count: 0,
            payload: Payload::Hello {
                willingness: 3,
                neighbors: neighbors.iter().map(|&(id, c)| (n(id), c)).collect(),
            },
        }
    }

    fn tc(from: u32, seq: u32, selectors: &[u32]) -> ControlMessage {
        ControlMessage {
            originator: n(from),
            sequence_number: seq,
            validity_time: 15.0,
            ttl: FLOOD_TTL,
            hop_count: 0,
            payload: Payload::Tc { selectors: selectors.iter().map(|&i| n(i)).collect() },
        }
    }

    fn state(id: u32) -> NodeState {
        NodeState::new(n(id), OlsrConfig::rfc3626())
    }

    /// Node 0 with symmetric neighbor 1 that has selected 0 as its MPR.
    fn selected_by_one() -> NodeState {
        let mut s = state(0);
        s.process_message(&hello(1, &[(0, LinkCode::MprSelected)]), n(1), 0.0).unwrap();
        s
    }

    #[test]
    fn first_contact_creates_asymmetric_link() {
        let mut s = state(0);
        let fwd = s.process_message(&hello(1, &[]), n(1), 0.0).unwrap();
        assert!(fwd.is_none());
        let link = s.links()[&n(1)];
        assert_eq!(link.status, LinkStatus::Asymmetric);
        assert_eq!(link.expiry, 6.0);
    }

    #[test]
    fn listed_in_hello_promotes_to_symmetric() {
        let mut s = state(0);
        s.process_message(&hello(1, &[]), n(1), 0.0).unwrap();
        s.process_message(&hello(1, &[(0, LinkCode::Asymmetric)]), n(1), 1.0).unwrap();
        assert_eq!(s.links()[&n(1)].status, LinkStatus::Symmetric);
        assert_eq!(s.routing_table().get(n(1)).unwrap().hops, 1);
    }

    #[test]
    fn two_hop_learned_from_symmetric_neighbor_only() {
        let mut s = state(0);
        s.process_message(&hello(1, &[(2, LinkCode::Symmetric)]), n(1), 0.0).unwrap();
        assert!(s.two_hop().is_empty());
        s.process_message(&hello(1, &[(0, LinkCode::Symmetric), (2, LinkCode::Symmetric), (3, LinkCode::Asymmetric)]), n(1), 1.0)
            .unwrap();
        assert_eq!(s.strict_two_hop(), BTreeSet::from([n(2)]));
        assert_eq!(s.mprs(), &BTreeSet::from([n(1)]));
        assert_eq!(s.routing_table().get(n(2)).unwrap().next_hop, n(1));
    }

    #[test]
    fn mpr_selected_code_adds_selector() {
        let s = selected_by_one();
        assert!(s.mpr_selectors().contains_key(&n(1)));
        let mut s = s;
        s.process_message(&hello(1, &[(0, LinkCode::Symmetric)]), n(1), 1.0).unwrap();
        assert!(s.mpr_selectors().is_empty());
    }

    #[test]
    fn own_messages_are_ignored() {
        let mut s = selected_by_one();
        let before = s.clone();
        assert!(s.process_message(&tc(0, 5, &[1]), n(1), 1.0).unwrap().is_none());
        assert_eq!(s, before);
    }

    #[test]
    fn unknown_kind_rejected_without_change() {
        let mut s = selected_by_one();
        let before = s.clone();
        let msg = ControlMessage { payload: Payload::Unknown { code: 42 }, ..tc(5, 1, &[]) };
        assert!(matches!(s.process_message(&msg, n(1), 1.0), Err(OlsrError::UnknownMessageKind(42))));
        assert_eq!(s, before);
    }

    #[test]
    fn stale_tc_is_dropped() {
        let mut s = selected_by_one();
        s.process_message(&tc(7, 10, &[8]), n(1), 1.0).unwrap();
        let after_first = s.topology().clone();
        s.process_message(&tc(7, 9, &[9]), n(1), 2.0).unwrap();
        assert_eq!(s.topology(), &after_first);
        s.process_message(&tc(7, 10, &[9]), n(1), 2.0).unwrap();
        assert_eq!(s.topology(), &after_first);
        assert_eq!(s.topology_seq(n(7)), Some(10));
        s.process_message(&tc(7, 11, &[9]), n(1), 3.0).unwrap();
        assert!(s.topology().contains_key(&(n(9), n(7))));
        assert!(!s.topology().contains_key(&(n(8), n(7))));
    }

    #[test]
    fn tc_expiry_uses_sender_validity() {
        let mut s = selected_by_one();
        let mut msg = tc(7, 1, &[8]);
        msg.validity_time = 42.0;
        s.process_message(&msg, n(1), 1.0).unwrap();
        assert_eq!(s.topology()[&(n(8), n(7))].expiry, 43.0);
    }

    #[test]
    fn tc_forwarded_once_for_selector() {
        let mut s = selected_by_one();
        let fwd = s.process_message(&tc(7, 1, &[8]), n(1), 1.0).unwrap().expect("forwarded");
        assert_eq!(fwd.ttl, FLOOD_TTL - 1);
        assert_eq!(fwd.hop_count, 1);
        assert!(s.duplicates().contains_key(&(n(7), MessageKind::Tc, 1)));
        assert!(s.process_message(&tc(7, 1, &[8]), n(1), 1.5).unwrap().is_none());
    }

    #[test]
    fn tc_not_forwarded_for_non_selector_or_exhausted_ttl() {
        let mut s = state(0);
        s.process_message(&hello(1, &[(0, LinkCode::Symmetric)]), n(1), 0.0).unwrap();
        assert!(s.process_message(&tc(7, 1, &[8]), n(1), 1.0).unwrap().is_none());
        // processed all the same
        assert!(s.topology().contains_key(&(n(8), n(7))));

        let mut s = selected_by_one();
        let mut msg = tc(7, 1, &[8]);
        msg.ttl = 1;
        assert!(s.process_message(&msg, n(1), 1.0).unwrap().is_none());
    }

    #[test]
    fn tc_from_non_symmetric_sender_discarded() {
        let mut s = state(0);
        s.process_message(&hello(1, &[]), n(1), 0.0).unwrap();
        assert!(s.process_message(&tc(7, 1, &[8]), n(1), 1.0).unwrap().is_none());
        assert!(s.topology().is_empty());
    }

    #[test]
    fn mid_creates_interface_route() {
        let mut s = state(0);
        s.process_message(&hello(1, &[(0, LinkCode::Symmetric)]), n(1), 0.0).unwrap();
        let mid = ControlMessage {
            payload: Payload::Mid { interfaces: vec![IfaceAddr(1001)] },
            validity_time: 15.0,
            ..tc(1, 0, &[])
        };
        s.process_message(&mid, n(1), 1.0).unwrap();
        assert_eq!(s.interface_assoc()[&IfaceAddr(1001)], (n(1), 16.0));
        assert_eq!(s.routing_table().interface_routes[&IfaceAddr(1001)].next_hop, n(1));
        s.purge_expired(16.5);
        assert!(s.interface_assoc().is_empty());
    }

    #[test]
    fn purge_boundary() {
        let mut s = state(0);
        s.process_message(&hello(1, &[(0, LinkCode::Symmetric), (2, LinkCode::Symmetric)]), n(1), 0.0).unwrap();
        assert!(!s.purge_expired(5.999));
        assert!(s.links().contains_key(&n(1)));
        assert!(s.purge_expired(6.001));
        assert!(s.links().is_empty());
        assert!(s.two_hop().is_empty());
        assert!(s.mprs().is_empty());
        assert!(s.routing_table().is_empty());
    }

    #[test]
    fn hello_advertises_link_codes() {
        let mut s = state(0);
        s.process_message(&hello(1, &[(0, LinkCode::Symmetric), (2, LinkCode::Symmetric)]), n(1), 0.0).unwrap();
        s.process_message(&hello(3, &[]), n(3), 0.0).unwrap();
        let msg = s.make_hello();
        let Payload::Hello { neighbors, willingness } = &msg.payload else { panic!() };
        assert_eq!(*willingness, 3);
        assert_eq!(neighbors, &vec![(n(1), LinkCode::MprSelected), (n(3), LinkCode::Asymmetric)]);
        assert_eq!(msg.validity_time, 6.0);
    }

    #[test]
    fn tc_and_mid_generation_rules() {
        let mut s = state(0);
        assert!(s.make_tc().is_none());
        assert!(s.make_mid().is_none());
        let mut s = selected_by_one().with_interfaces(vec![IfaceAddr(5)]);
        let a = s.make_tc().unwrap();
        let b = s.make_tc().unwrap();
        assert!(b.sequence_number > a.sequence_number);
        assert_eq!(a.validity_time, 15.0);
        let mid = s.make_mid().unwrap();
        assert_eq!(mid.validity_time, 15.0);
        assert_eq!(mid.ttl, FLOOD_TTL);
    }
}
