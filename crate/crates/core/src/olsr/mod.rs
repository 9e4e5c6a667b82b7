//! OLSR protocol core: per-node state machine, relay selection and routing.

mod config;
mod emit;
mod message;
mod mpr;
mod routing;
mod state;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{OlsrConfig, HOLD_TIME_RANGE, INTERVAL_RANGE, PARAM_COUNT, WILL_ALWAYS, WILL_NEVER};
pub use emit::PeriodicEmitter;
pub use message::{ControlMessage, LinkCode, MessageKind, Payload, ENTRY_BYTES, FLOOD_TTL, MESSAGE_HEADER_BYTES};
pub use mpr::{select_mprs, MprSelection};
pub use routing::{shortest_routes, Route, RoutingTable};
pub use state::{LinkStatus, LinkTuple, NodeState, TopologyTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Address of a secondary network interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IfaceAddr(pub u32);

#[derive(Debug, Error, PartialEq)]
pub enum OlsrError {
    #[error("unknown message type code {0}")]
    UnknownMessageKind(u8),
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },
}
