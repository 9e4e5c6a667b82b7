use serde::{Deserialize, Serialize};

use super::SimError;

/// Raw tallies accumulated during one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub data_sent: u64,
    pub data_delivered: u64,
    pub drop_no_route: u64,
    pub drop_ttl: u64,
    pub drop_mac: u64,
    pub drop_queue: u64,
    pub drop_silenced: u64,
    /// Data packets still queued or on the air when the run ended.
    pub data_in_flight: u64,
    /// Control message transmissions, each hop counted.
    pub routing_tx: u64,
    /// Data frame transmission attempts, retries included.
    pub data_tx_attempts: u64,
    /// Receiver-side frame losses caused by overlapping transmissions.
    pub collisions: u64,
    pub delay_sum: f64,
    pub hops_sum: u64,
}

impl Counters {
    pub fn data_dropped(&self) -> u64 {
        self.drop_no_route + self.drop_ttl + self.drop_mac + self.drop_queue + self.drop_silenced
    }
}

/// Quality-of-service figures of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosMetrics {
    /// Packet delivery ratio, fraction in [0, 1].
    pub pdr: f64,
    /// Routing transmissions per delivered data packet.
    pub nrl: f64,
    /// Mean end-to-end delay of delivered packets, seconds.
    pub e2ed: f64,
    /// Mean hop count of delivered packets.
    pub rpl: f64,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_flight: u64,
    pub routing_tx: u64,
}

/// Derives the QoS figures. With nothing delivered the delay is reported as
/// the run duration and the path length as 0.
pub fn collect_metrics(counters: &Counters, duration: f64) -> Result<QosMetrics, SimError> {
    if counters.data_sent == 0 {
        return Err(SimError::NothingSent);
    }
    let delivered = counters.data_delivered;
    let (e2ed, rpl) = if delivered == 0 {
        (duration, 0.0)
    } else {
        (counters.delay_sum / delivered as f64, counters.hops_sum as f64 / delivered as f64)
    };
    Ok(QosMetrics {
        pdr: delivered as f64 / counters.data_sent as f64,
        nrl: counters.routing_tx as f64 / delivered.max(1) as f64,
        e2ed,
        rpl,
        sent: counters.data_sent,
        delivered,
        dropped: counters.data_dropped(),
        in_flight: counters.data_in_flight,
        routing_tx: counters.routing_tx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_from_counts() {
        let c = Counters { data_sent: 1200, data_delivered: 1100, routing_tx: 33, delay_sum: 11.0, hops_sum: 2200, ..Default::default() };
        let m = collect_metrics(&c, 180.0).unwrap();
        assert!((m.pdr - 0.91667).abs() < 5e-6);
        assert!((m.nrl - 0.03).abs() < 1e-15);
        assert!((m.e2ed - 0.01).abs() < 1e-15);
        assert_eq!(m.rpl, 2.0);
    }

    #[test]
    fn zero_delivery_penalty() {
        let c = Counters { data_sent: 10, routing_tx: 5, ..Default::default() };
        let m = collect_metrics(&c, 60.0).unwrap();
        assert_eq!(m.pdr, 0.0);
        assert_eq!(m.e2ed, 60.0);
        assert_eq!(m.rpl, 0.0);
        assert_eq!(m.nrl, 5.0);
    }

    #[test]
    fn zero_routing_load() {
        let c = Counters { data_sent: 10, data_delivered: 10, delay_sum: 0.1, hops_sum: 10, ..Default::default() };
        assert_eq!(collect_metrics(&c, 60.0).unwrap().nrl, 0.0);
    }

    #[test]
    fn nothing_sent_is_an_error() {
        assert!(matches!(collect_metrics(&Counters::default(), 1.0), Err(SimError::NothingSent)));
    }
}
