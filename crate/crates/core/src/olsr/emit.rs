use rand::Rng;

use super::message::{ControlMessage, MessageKind};
use super::state::NodeState;

/// Timers driving periodic HELLO, TC and MID generation for one node.
///
/// Each period is shortened by a jitter drawn from U(0, period/4) when
/// jitter is enabled. TC and MID timers keep ticking even when the node has
/// nothing to advertise.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicEmitter {
    jitter: bool,
    next_hello: f64,
    next_tc: f64,
    next_mid: f64,
}

impl PeriodicEmitter {
    /// Schedules the first emissions one (jittered) period after `start`.
    pub fn new<R: Rng + ?Sized>(state: &NodeState, start: f64, jitter: bool, rng: &mut R) -> Self {
        let cfg = state.config();
        let mut emitter = PeriodicEmitter { jitter, next_hello: 0.0, next_tc: 0.0, next_mid: 0.0 };
        emitter.next_hello = start + emitter.period(cfg.hello_period(), rng);
        emitter.next_tc = start + emitter.period(cfg.tc_interval, rng);
        emitter.next_mid = start + emitter.period(cfg.refresh_interval, rng);
        emitter
    }

    fn period<R: Rng + ?Sized>(&self, interval: f64, rng: &mut R) -> f64 {
        if self.jitter {
            interval - rng.random_range(0.0..interval / 4.0)
        } else {
            interval
        }
    }

    /// Time of the next due emission of any kind.
    pub fn next_due(&self) -> f64 {
        self.next_hello.min(self.next_tc).min(self.next_mid)
    }

    pub fn next_time(&self, kind: MessageKind) -> f64 {
        match kind {
            MessageKind::Hello => self.next_hello,
            MessageKind::Tc => self.next_tc,
            MessageKind::Mid => self.next_mid,
        }
    }

    /// Emits every message due at or before `now` and advances the timers.
    pub fn emit_due<R: Rng + ?Sized>(&mut self, state: &mut NodeState, now: f64, rng: &mut R) -> Vec<ControlMessage> {
        let cfg = *state.config();
        let mut out = Vec::new();
        while self.next_hello <= now {
            out.push(state.make_hello());
            self.next_hello += self.period(cfg.hello_period(), rng);
        }
        while self.next_tc <= now {
            out.extend(state.make_tc());
            self.next_tc += self.period(cfg.tc_interval, rng);
        }
        while self.next_mid <= now {
            out.extend(state.make_mid());
            self.next_mid += self.period(cfg.refresh_interval, rng);
        }
        out
    }
}
