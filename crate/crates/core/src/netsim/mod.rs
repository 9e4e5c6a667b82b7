//! Discrete-event network simulator: disk radio, contention MAC, CBR traffic
//! and QoS accounting.
//!
//! Event log lines have the form `time node kind detail`, time with six
//! decimals, after a `#` header line. Kinds are `send`, `tx`, `deliver`,
//! `drop`, `purge` and `reject`.

mod event;
mod mac;
mod metrics;
mod params;
mod sim;

use thiserror::Error;

pub use event::{EventKind, EventQueue, SimEvent};
pub use mac::{Channel, Reception, Transmission};
pub use metrics::{collect_metrics, Counters, QosMetrics};
pub use params::{CbrSession, RadioMacParams};
pub use sim::{run_simulation, DataPacket, SimOptions, Simulation, DATA_HEADER_BYTES, DATA_TTL, EVENT_LOG_HEADER};

use crate::olsr::OlsrError;
use crate::scenario::ScenarioError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("configuration: {0}")]
    Config(#[from] OlsrError),
    #[error("scenario has no CBR sessions")]
    NoSessions,
    #[error("no data packets were sent")]
    NothingSent,
    #[error("event log: {0}")]
    Log(std::io::Error),
}
