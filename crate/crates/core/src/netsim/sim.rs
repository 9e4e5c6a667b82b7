use std::collections::VecDeque;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::event::{EventKind, EventQueue};
use super::mac::Channel;
use super::metrics::{collect_metrics, Counters, QosMetrics};
use super::SimError;
use crate::olsr::{ControlMessage, NodeId, NodeState, OlsrConfig, PeriodicEmitter};
use crate::scenario::ScenarioSpec;

/// IP and UDP headers added to every CBR payload.
pub const DATA_HEADER_BYTES: usize = 28;
/// Data packets are dropped after this many hops.
pub const DATA_TTL: u32 = 64;
/// Purge events fire this long after the earliest expiry so that the expiring
/// tuple satisfies `expiry < now`.
const PURGE_DELAY: f64 = 1e-6;

pub const EVENT_LOG_HEADER: &str = "# olsr-tune event log v1: time node kind detail";

#[derive(Debug, Clone, PartialEq)]
pub struct DataPacket {
    pub id: u64,
    pub source: NodeId,
    pub destination: NodeId,
    pub origin_time: f64,
    /// Links traversed so far.
    pub hops: u32,
    pub size: usize,
}

#[derive(Debug, Clone)]
enum FramePayload {
    Control(ControlMessage),
    Data(DataPacket),
}

#[derive(Debug, Clone)]
struct Frame {
    payload: FramePayload,
    /// `None` for broadcast.
    next_hop: Option<NodeId>,
    bytes: usize,
    retries: u32,
}

#[derive(Debug, Clone)]
enum EventData {
    None,
    TxEnd(u64),
    Arrival { from: NodeId, payload: FramePayload },
    Cbr { session: usize, index: u64 },
}

struct NodeRuntime {
    state: NodeState,
    emitter: PeriodicEmitter,
    queue: VecDeque<Frame>,
    transmitting: bool,
    attempt_scheduled: bool,
    purge_at: Option<f64>,
    silenced_from: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    /// Jitter periodic emissions (recommended; disabling it synchronizes nodes).
    pub jitter: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { jitter: true }
    }
}

/// One run of a scenario under one OLSR configuration.
pub struct Simulation<'a> {
    scenario: &'a ScenarioSpec,
    nodes: Vec<NodeRuntime>,
    events: EventQueue<EventData>,
    channel: Channel<Frame>,
    rng: ChaCha8Rng,
    now: f64,
    counters: Counters,
    next_packet: u64,
    log: Option<Box<dyn Write + 'a>>,
    log_error: Option<std::io::Error>,
}

/// Simulates `scenario` with every node running `config`.
///
/// The result is a pure function of the three arguments.
pub fn run_simulation(scenario: &ScenarioSpec, config: &OlsrConfig, seed: u64) -> Result<QosMetrics, SimError> {
    config.validate()?;
    if scenario.sessions.is_empty() {
        return Err(SimError::NoSessions);
    }
    Simulation::new(scenario, *config, seed)?.run()
}

impl<'a> Simulation<'a> {
    /// Prepares a run. Accepts any configuration with positive finite times,
    /// including ones outside the tuning ranges.
    pub fn new(scenario: &'a ScenarioSpec, config: OlsrConfig, seed: u64) -> Result<Self, SimError> {
        Self::with_options(scenario, config, seed, SimOptions::default())
    }

    pub fn with_options(scenario: &'a ScenarioSpec, config: OlsrConfig, seed: u64, options: SimOptions) -> Result<Self, SimError> {
        scenario.validate()?;
        config.validate_waived()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut events = EventQueue::new();
        let nodes = (0..scenario.node_count())
            .map(|i| {
                let id = NodeId(i as u32);
                let state = NodeState::new(id, config);
                let emitter = PeriodicEmitter::new(&state, 0.0, options.jitter, &mut rng);
                events.push(emitter.next_due(), EventKind::PeriodicEmit, id, EventData::None);
                NodeRuntime {
                    state,
                    emitter,
                    queue: VecDeque::new(),
                    transmitting: false,
                    attempt_scheduled: false,
                    purge_at: None,
                    silenced_from: None,
                }
            })
            .collect();
        for (k, s) in scenario.sessions.iter().enumerate() {
            events.push(s.start, EventKind::CbrSend, s.source, EventData::Cbr { session: k, index: 0 });
        }
        events.push(scenario.duration, EventKind::SimEnd, NodeId(0), EventData::None);
        Ok(Simulation {
            scenario,
            nodes,
            events,
            channel: Channel::new(scenario.radio.slot_time, scenario.radio.contention),
            rng,
            now: 0.0,
            counters: Counters::default(),
            next_packet: 0,
            log: None,
            log_error: None,
        })
    }

    /// Writes one line per notable event to `sink`.
    pub fn with_event_log(mut self, mut sink: Box<dyn Write + 'a>) -> Self {
        if let Err(e) = writeln!(sink, "{EVENT_LOG_HEADER}") {
            self.log_error = Some(e);
        }
        self.log = Some(sink);
        self
    }

    /// Node stops transmitting anything from time `from` on.
    pub fn silence(&mut self, node: NodeId, from: f64) {
        self.nodes[node.0 as usize].silenced_from = Some(from);
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn node_state(&self, node: NodeId) -> &NodeState {
        &self.nodes[node.0 as usize].state
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn position(&self, node: NodeId, time: f64) -> (f64, f64) {
        self.scenario.trace.position_at(node, time)
    }

    pub fn in_range(&self, a: NodeId, b: NodeId, time: f64) -> bool {
        let (xa, ya) = self.position(a, time);
        let (xb, yb) = self.position(b, time);
        let r = self.scenario.radio.tx_range;
        (xa - xb).powi(2) + (ya - yb).powi(2) <= r * r
    }

    /// Processes every event up to and including `until` (capped at the run duration).
    pub fn run_until(&mut self, until: f64) {
        let until = until.min(self.scenario.duration);
        while self.events.peek_time().is_some_and(|t| t <= until) {
            let ev = self.events.pop().expect("peeked");
            self.now = ev.time;
            self.handle(ev.kind, ev.subject, ev.payload);
        }
        self.now = self.now.max(until);
    }

    /// Runs to the end and reports the QoS metrics.
    pub fn run(mut self) -> Result<QosMetrics, SimError> {
        self.run_until(self.scenario.duration);
        self.counters.data_in_flight = self.count_in_flight();
        if let Some(log) = self.log.as_mut() {
            if let Err(e) = log.flush() {
                self.log_error.get_or_insert(e);
            }
        }
        if let Some(e) = self.log_error.take() {
            return Err(SimError::Log(e));
        }
        collect_metrics(&self.counters, self.scenario.duration)
    }

    /// Counters as of now, with in-flight data counted.
    pub fn snapshot(&self) -> Counters {
        Counters { data_in_flight: self.count_in_flight(), ..self.counters.clone() }
    }

    fn count_in_flight(&self) -> u64 {
        let queued: usize = self
            .nodes
            .iter()
            .map(|n| n.queue.iter().filter(|f| matches!(f.payload, FramePayload::Data(_))).count())
            .sum();
        let on_air = self.channel.unresolved().filter(|t| matches!(t.frame.payload, FramePayload::Data(_))).count();
        let arriving = self
            .events
            .iter()
            .filter(|e| matches!(&e.payload, EventData::Arrival { payload: FramePayload::Data(_), .. }))
            .count();
        (queued + on_air + arriving) as u64
    }

    fn log(&mut self, node: NodeId, kind: &str, detail: std::fmt::Arguments<'_>) {
        if let Some(log) = self.log.as_mut() {
            if let Err(e) = writeln!(log, "{:.6} {} {} {}", self.now, node, kind, detail) {
                self.log_error.get_or_insert(e);
            }
        }
    }

    fn handle(&mut self, kind: EventKind, subject: NodeId, data: EventData) {
        let now = self.now;
        let idx = subject.0 as usize;
        match (kind, data) {
            (EventKind::PeriodicEmit, _) => {
                let node = &mut self.nodes[idx];
                node.state.purge_expired(now);
                let msgs = node.emitter.emit_due(&mut node.state, now, &mut self.rng);
                let next = node.emitter.next_due();
                self.events.push(next, EventKind::PeriodicEmit, subject, EventData::None);
                for msg in msgs {
                    self.send_control(subject, msg);
                }
            }
            (EventKind::CbrSend, EventData::Cbr { session, index }) => {
                let s = self.scenario.sessions[session];
                let packet = DataPacket {
                    id: self.next_packet,
                    source: s.source,
                    destination: s.destination,
                    origin_time: now,
                    hops: 0,
                    size: s.packet_size,
                };
                self.next_packet += 1;
                self.counters.data_sent += 1;
                self.log(subject, "send", format_args!("id={} dst={}", packet.id, packet.destination));
                let next = s.start + (index + 1) as f64 / s.packet_rate;
                if next < s.start + s.duration - 1e-9 {
                    self.events.push(next, EventKind::CbrSend, subject, EventData::Cbr { session, index: index + 1 });
                }
                self.route_data(packet, subject);
            }
            (EventKind::MacAttempt, _) => {
                self.nodes[idx].attempt_scheduled = false;
                self.try_transmit(subject);
            }
            (EventKind::TxEnd, EventData::TxEnd(id)) => self.finish_transmission(id),
            (EventKind::FrameArrival, EventData::Arrival { from, payload }) => match payload {
                FramePayload::Control(msg) => {
                    let result = self.nodes[idx].state.process_message(&msg, from, now);
                    match result {
                        Ok(Some(fwd)) => self.send_control(subject, fwd),
                        Ok(None) => {}
                        Err(e) => self.log(subject, "reject", format_args!("from={from} {e}")),
                    }
                }
                FramePayload::Data(mut packet) => {
                    packet.hops += 1;
                    self.route_data(packet, subject);
                }
            },
            (EventKind::TuplePurge, _) => {
                if self.nodes[idx].purge_at == Some(now) {
                    self.nodes[idx].purge_at = None;
                    if self.nodes[idx].state.purge_expired(now) {
                        self.log(subject, "purge", format_args!("routes={}", self.nodes[idx].state.routing_table().len()));
                    }
                }
            }
            (EventKind::SimEnd, _) => return,
            (kind, _) => unreachable!("event {kind} with mismatched payload"),
        }
        if kind != EventKind::TxEnd {
            self.schedule_purge(subject);
        }
    }

    fn schedule_purge(&mut self, node: NodeId) {
        let now = self.now;
        let rt = &mut self.nodes[node.0 as usize];
        let Some(expiry) = rt.state.next_expiry() else { return };
        let at = (expiry + PURGE_DELAY).max(now);
        if rt.purge_at.is_none_or(|p| p < now || at < p) {
            rt.purge_at = Some(at);
            self.events.push(at, EventKind::TuplePurge, node, EventData::None);
        }
    }

    fn is_silenced(&self, node: NodeId) -> bool {
        self.nodes[node.0 as usize].silenced_from.is_some_and(|t| self.now >= t)
    }

    fn send_control(&mut self, node: NodeId, msg: ControlMessage) {
        let bytes = msg.size_bytes();
        self.enqueue(node, Frame { payload: FramePayload::Control(msg), next_hop: None, bytes, retries: 0 });
    }

    fn route_data(&mut self, packet: DataPacket, at: NodeId) {
        let now = self.now;
        if at == packet.destination {
            self.counters.data_delivered += 1;
            self.counters.delay_sum += now - packet.origin_time;
            self.counters.hops_sum += u64::from(packet.hops);
            self.log(at, "deliver", format_args!("id={} hops={} delay={:.6}", packet.id, packet.hops, now - packet.origin_time));
            return;
        }
        if packet.hops >= DATA_TTL {
            self.counters.drop_ttl += 1;
            self.log(at, "drop", format_args!("id={} reason=ttl", packet.id));
            return;
        }
        let state = &mut self.nodes[at.0 as usize].state;
        state.purge_expired(now);
        match state.routing_table().get(packet.destination).copied() {
            None => {
                self.counters.drop_no_route += 1;
                self.log(at, "drop", format_args!("id={} reason=no-route", packet.id));
            }
            Some(route) => {
                let bytes = packet.size + DATA_HEADER_BYTES;
                self.enqueue(at, Frame { payload: FramePayload::Data(packet), next_hop: Some(route.next_hop), bytes, retries: 0 });
            }
        }
    }

    fn drop_frame(&mut self, node: NodeId, frame: &Frame, reason: &str) {
        if let FramePayload::Data(p) = &frame.payload {
            match reason {
                "silenced" => self.counters.drop_silenced += 1,
                "queue" => self.counters.drop_queue += 1,
                _ => self.counters.drop_mac += 1,
            }
            self.log(node, "drop", format_args!("id={} reason={reason}", p.id));
        }
    }

    fn enqueue(&mut self, node: NodeId, frame: Frame) {
        if self.is_silenced(node) {
            self.drop_frame(node, &frame, "silenced");
            return;
        }
        let limit = self.scenario.radio.queue_limit;
        let rt = &mut self.nodes[node.0 as usize];
        if rt.queue.len() >= limit {
            self.drop_frame(node, &frame, "queue");
            return;
        }
        rt.queue.push_back(frame);
        if !rt.transmitting && !rt.attempt_scheduled {
            self.schedule_attempt(node, self.now);
        }
    }

    fn schedule_attempt(&mut self, node: NodeId, from: f64) {
        let radio = &self.scenario.radio;
        let delay = if radio.contention {
            radio.difs + radio.slot_time * f64::from(self.rng.random_range(0..=radio.backoff_window))
        } else {
            0.0
        };
        self.nodes[node.0 as usize].attempt_scheduled = true;
        self.events.push(from + delay, EventKind::MacAttempt, node, EventData::None);
    }

    fn try_transmit(&mut self, node: NodeId) {
        let now = self.now;
        let rt = &self.nodes[node.0 as usize];
        if rt.transmitting || rt.queue.is_empty() {
            return;
        }
        if self.is_silenced(node) {
            let stale: Vec<Frame> = self.nodes[node.0 as usize].queue.drain(..).collect();
            for frame in &stale {
                self.drop_frame(node, frame, "silenced");
            }
            return;
        }
        if let Some(busy_until) = self.channel.busy_until(node, now) {
            self.schedule_attempt(node, busy_until);
            return;
        }
        let frame = self.nodes[node.0 as usize].queue.pop_front().expect("nonempty queue");
        let receivers: Vec<NodeId> = (0..self.nodes.len() as u32)
            .map(NodeId)
            .filter(|&other| other != node && self.in_range(node, other, now))
            .collect();
        let airtime = self.scenario.radio.airtime(frame.bytes);
        match &frame.payload {
            FramePayload::Control(msg) => {
                self.counters.routing_tx += 1;
                let kind = msg.kind().map(|k| k.to_string()).unwrap_or_else(|_| "?".into());
                self.log(node, "tx", format_args!("{kind} orig={} seq={} bytes={}", msg.originator, msg.sequence_number, frame.bytes));
            }
            FramePayload::Data(p) => {
                self.counters.data_tx_attempts += 1;
                let to = frame.next_hop.expect("data frames are unicast");
                self.log(node, "tx", format_args!("DATA id={} to={to} try={}", p.id, frame.retries + 1));
            }
        }
        let id = self.channel.begin(node, frame, now, airtime, receivers);
        self.nodes[node.0 as usize].transmitting = true;
        self.events.push(now + airtime, EventKind::TxEnd, node, EventData::TxEnd(id));
    }

    fn finish_transmission(&mut self, id: u64) {
        let now = self.now;
        let sender = self.channel.get(id).expect("transmission in flight").sender;
        let (reception, frame) = self.channel.finish(id);
        let mut frame = frame.clone();
        self.counters.collisions += reception.corrupted.len() as u64;
        let arrival = now + self.scenario.radio.processing_delay;
        match frame.next_hop {
            None => {
                for &r in &reception.delivered {
                    self.events.push(
                        arrival,
                        EventKind::FrameArrival,
                        r,
                        EventData::Arrival { from: sender, payload: frame.payload.clone() },
                    );
                }
            }
            Some(next_hop) => {
                if reception.delivered.contains(&next_hop) {
                    self.events.push(arrival, EventKind::FrameArrival, next_hop, EventData::Arrival { from: sender, payload: frame.payload });
                } else {
                    frame.retries += 1;
                    if frame.retries > self.scenario.radio.max_retransmissions {
                        self.drop_frame(sender, &frame, "mac");
                    } else {
                        self.nodes[sender.0 as usize].queue.push_front(frame);
                    }
                }
            }
        }
        let rt = &mut self.nodes[sender.0 as usize];
        rt.transmitting = false;
        if !rt.queue.is_empty() && !rt.attempt_scheduled {
            self.schedule_attempt(sender, now);
        }
    }
}
