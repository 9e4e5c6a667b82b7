use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use crate::olsr::NodeId;

/// Event kinds in tie-breaking precedence order: at equal timestamps a
/// finishing transmission is resolved before anything else so the channel
/// state is current, and the end-of-run marker comes last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    TxEnd,
    FrameArrival,
    TuplePurge,
    PeriodicEmit,
    CbrSend,
    MacAttempt,
    SimEnd,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::TxEnd => "tx-end",
            EventKind::FrameArrival => "frame-arrival",
            EventKind::TuplePurge => "tuple-purge",
            EventKind::PeriodicEmit => "periodic-emit",
            EventKind::CbrSend => "cbr-send",
            EventKind::MacAttempt => "mac-attempt",
            EventKind::SimEnd => "sim-end",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SimEvent<P> {
    pub time: f64,
    pub kind: EventKind,
    pub subject: NodeId,
    pub payload: P,
}

struct Entry<P> {
    event: SimEvent<P>,
    seq: u64,
}

impl<P> Entry<P> {
    fn key(&self) -> (f64, EventKind, NodeId, u64) {
        (self.event.time, self.event.kind, self.event.subject, self.seq)
    }
}

impl<P> PartialEq for Entry<P> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<P> Eq for Entry<P> {}

impl<P> PartialOrd for Entry<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Entry<P> {
    // reversed: BinaryHeap is a max-heap and we want the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        let (ta, ka, sa, qa) = self.key();
        let (tb, kb, sb, qb) = other.key();
        tb.total_cmp(&ta).then(kb.cmp(&ka)).then(sb.cmp(&sa)).then(qb.cmp(&qa))
    }
}

/// Priority queue ordered by (time, kind precedence, subject, insertion order).
pub struct EventQueue<P> {
    heap: BinaryHeap<Entry<P>>,
    inserted: u64,
}

impl<P> Default for EventQueue<P> {
    fn default() -> Self {
        EventQueue { heap: BinaryHeap::new(), inserted: 0 }
    }
}

impl<P> EventQueue<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, kind: EventKind, subject: NodeId, payload: P) {
        debug_assert!(time.is_finite(), "event time must be finite");
        self.heap.push(Entry { event: SimEvent { time, kind, subject, payload }, seq: self.inserted });
        self.inserted += 1;
    }

    pub fn pop(&mut self) -> Option<SimEvent<P>> {
        self.heap.pop().map(|e| e.event)
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.event.time)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SimEvent<P>> {
        self.heap.iter().map(|e| &e.event)
    }
}
