use serde::{Deserialize, Serialize};

use crate::olsr::NodeId;

/// Radio and MAC constants shared by every node of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioMacParams {
    /// Disk radius within which frames are received, meters.
    pub tx_range: f64,
    /// Channel bit rate, bits per second.
    pub bandwidth: f64,
    /// Unicast retries after the first attempt before the frame is dropped.
    pub max_retransmissions: u32,
    /// Delay between frame reception and its handling by the receiver, seconds.
    pub processing_delay: f64,
    /// Fixed per-frame preamble and PLCP header time, seconds.
    pub phy_overhead: f64,
    /// Backoff slot and carrier-sense detection latency, seconds.
    pub slot_time: f64,
    /// Idle time sensed before any attempt, seconds.
    pub difs: f64,
    /// Backoff is drawn uniformly from 0..=backoff_window slots.
    pub backoff_window: u32,
    /// Frames a node may hold in its interface queue.
    pub queue_limit: usize,
    /// When false the channel is ideal: no carrier sense, no collisions.
    pub contention: bool,
}

impl Default for RadioMacParams {
    fn default() -> Self {
        RadioMacParams {
            tx_range: 250.0,
            bandwidth: 5.5e6,
            max_retransmissions: 6,
            processing_delay: 1e-4,
            phy_overhead: 192e-6,
            slot_time: 20e-6,
            difs: 50e-6,
            backoff_window: 31,
            queue_limit: 50,
            contention: true,
        }
    }
}

impl RadioMacParams {
    /// Time on air of a frame of `bytes` bytes.
    pub fn airtime(&self, bytes: usize) -> f64 {
        self.phy_overhead + bytes as f64 * 8.0 / self.bandwidth
    }
}

/// Constant-bit-rate UDP flow between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CbrSession {
    pub source: NodeId,
    pub destination: NodeId,
    pub start: f64,
    pub duration: f64,
    #[serde(default = "default_packet_size")]
    pub packet_size: usize,
    #[serde(default = "default_packet_rate")]
    pub packet_rate: f64,
}

fn default_packet_size() -> usize {
    512
}

fn default_packet_rate() -> f64 {
    4.0
}

impl CbrSession {
    pub fn new(source: NodeId, destination: NodeId, start: f64, duration: f64) -> Self {
        CbrSession {
            source,
            destination,
            start,
            duration,
            packet_size: default_packet_size(),
            packet_rate: default_packet_rate(),
        }
    }

    /// Send times of every packet: start + k / rate for k = 0, 1, ... while
    /// strictly inside the session window.
    pub fn send_times(&self) -> impl Iterator<Item = f64> + '_ {
        let period = 1.0 / self.packet_rate;
        let end = self.start + self.duration;
        (0u64..)
            .map(move |k| self.start + k as f64 * period)
            .take_while(move |&t| t < end - 1e-9)
    }
}
