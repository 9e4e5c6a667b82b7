//! OLSR routing simulation and automatic protocol parameter tuning for
//! vehicular ad hoc networks.
//!
//! The crate bundles a deterministic discrete-event simulator running the
//! OLSR core protocol, a weighted QoS cost function, five search strategies
//! over the eight OLSR timing parameters, and rank-based statistics for
//! comparing optimizer runs.

pub mod fitness;
pub mod netsim;
pub mod olsr;
pub mod optimizers;
pub mod scenario;
pub mod stats;
