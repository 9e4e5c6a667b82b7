//! Shared broadcast channel with carrier sense and collisions.
//!
//! A node senses a transmission only if it is within range of the sender
//! and the transmission started at least one slot earlier. A frame is lost
//! at a receiver when any other transmission audible at that receiver
//! overlaps it in time, or when the receiver itself transmits meanwhile.

use std::collections::VecDeque;

use crate::olsr::NodeId;

#[derive(Debug, Clone)]
pub struct Transmission<F> {
    pub id: u64,
    pub sender: NodeId,
    pub start: f64,
    pub end: f64,
    /// Nodes within range of the sender when the transmission started, sorted.
    pub receivers: Vec<NodeId>,
    pub frame: F,
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reception {
    pub delivered: Vec<NodeId>,
    pub corrupted: Vec<NodeId>,
}

#[derive(Debug)]
pub struct Channel<F> {
    active: VecDeque<Transmission<F>>,
    next_id: u64,
    /// Carrier-sense detection latency.
    slot_time: f64,
    collisions: bool,
}

impl<F> Channel<F> {
    pub fn new(slot_time: f64, collisions: bool) -> Self {
        Channel { active: VecDeque::new(), next_id: 0, slot_time, collisions }
    }

    /// Latest end time among transmissions `node` can sense at `now`, if the
    /// medium is busy.
    pub fn busy_until(&self, node: NodeId, now: f64) -> Option<f64> {
        if !self.collisions {
            return None;
        }
        self.active
            .iter()
            .filter(|t| t.sender != node && t.end > now && t.start <= now - self.slot_time)
            .filter(|t| t.receivers.binary_search(&node).is_ok())
            .map(|t| t.end)
            .max_by(f64::total_cmp)
    }

    /// Puts a frame on the air. `receivers` need not be sorted.
    pub fn begin(&mut self, sender: NodeId, frame: F, start: f64, airtime: f64, mut receivers: Vec<NodeId>) -> u64 {
        receivers.sort_unstable();
        let id = self.next_id;
        self.next_id += 1;
        self.active.push_back(Transmission { id, sender, start, end: start + airtime, receivers, frame, resolved: false });
        id
    }

    pub fn get(&self, id: u64) -> Option<&Transmission<F>> {
        let first = self.active.front()?.id;
        id.checked_sub(first).and_then(|i| self.active.get(i as usize))
    }

    /// Resolves a finished transmission into per-receiver outcomes.
    pub fn finish(&mut self, id: u64) -> (Reception, &F) {
        let first = self.active.front().expect("finishing unknown transmission").id;
        let idx = (id - first) as usize;
        let (start, end, sender) = {
            let t = &self.active[idx];
            (t.start, t.end, t.sender)
        };
        let mut reception = Reception { delivered: Vec::new(), corrupted: Vec::new() };
        for &r in &self.active[idx].receivers {
            let lost = self.collisions
                && self.active.iter().any(|o| {
                    o.id != id
                        && o.start < end
                        && o.end > start
                        && (o.sender == r || (o.sender != sender && o.receivers.binary_search(&r).is_ok()))
                });
            if lost {
                reception.corrupted.push(r);
            } else {
                reception.delivered.push(r);
            }
        }
        self.active[idx].resolved = true;
        // a resolved frame is kept while it may still overlap a pending one
        let horizon = self.active.iter().filter(|t| !t.resolved).map(|t| t.start).fold(end, f64::min);
        while self.active.front().is_some_and(|t| t.resolved && t.end < horizon) {
            self.active.pop_front();
        }
        let idx = (id - self.active.front().unwrap().id) as usize;
        (reception, &self.active[idx].frame)
    }

    /// Transmissions started but not yet resolved.
    pub fn unresolved(&self) -> impl Iterator<Item = &Transmission<F>> {
        self.active.iter().filter(|t| !t.resolved)
    }
}
