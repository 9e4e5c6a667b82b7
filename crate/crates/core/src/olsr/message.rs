use std::fmt;

use serde::{Deserialize, Serialize};

use super::{IfaceAddr, NodeId, OlsrError};

/// Hop budget assigned to flooded TC and MID messages.
pub const FLOOD_TTL: u8 = 255;

/// Fixed part of every control message: packet and message headers.
pub const MESSAGE_HEADER_BYTES: usize = 16;
/// Size of one advertised address entry.
pub const ENTRY_BYTES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MessageKind {
    Hello,
    Tc,
    Mid,
}

impl MessageKind {
    /// Message type codes as assigned by RFC 3626.
    pub fn code(self) -> u8 {
        match self {
            MessageKind::Hello => 1,
            MessageKind::Tc => 2,
            MessageKind::Mid => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, OlsrError> {
        match code {
            1 => Ok(MessageKind::Hello),
            2 => Ok(MessageKind::Tc),
            3 => Ok(MessageKind::Mid),
            other => Err(OlsrError::UnknownMessageKind(other)),
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageKind::Hello => "HELLO",
            MessageKind::Tc => "TC",
            MessageKind::Mid => "MID",
        })
    }
}

/// Link status a HELLO sender advertises for one of its neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LinkCode {
    Asymmetric,
    Symmetric,
    /// Symmetric, and the sender has selected this neighbor as MPR.
    MprSelected,
}

impl LinkCode {
    pub fn is_symmetric(self) -> bool {
        !matches!(self, LinkCode::Asymmetric)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    Hello { willingness: u8, neighbors: Vec<(NodeId, LinkCode)> },
    Tc { selectors: Vec<NodeId> },
    Mid { interfaces: Vec<IfaceAddr> },
    /// A message whose type code this implementation does not understand.
    Unknown { code: u8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlMessage {
    pub originator: NodeId,
    pub sequence_number: u32,
    /// Validity of the carried information, in seconds.
    pub validity_time: f64,
    pub ttl: u8,
    pub hop_count: u8,
    pub payload: Payload,
}

impl ControlMessage {
    pub fn kind(&self) -> Result<MessageKind, OlsrError> {
        match &self.payload {
            Payload::Hello { .. } => Ok(MessageKind::Hello),
            Payload::Tc { .. } => Ok(MessageKind::Tc),
            Payload::Mid { .. } => Ok(MessageKind::Mid),
            Payload::Unknown { code } => MessageKind::from_code(*code),
        }
    }

    /// Canonical on-air size used for airtime accounting.
    pub fn size_bytes(&self) -> usize {
        let entries = match &self.payload {
            Payload::Hello { neighbors, .. } => neighbors.len(),
            Payload::Tc { selectors } => selectors.len(),
            Payload::Mid { interfaces } => interfaces.len(),
            Payload::Unknown { .. } => 0,
        };
        MESSAGE_HEADER_BYTES + ENTRY_BYTES * entries
    }

    /// Copy prepared for retransmission by a relay.
    pub fn forwarded(&self) -> ControlMessage {
        ControlMessage {
            ttl: self.ttl.saturating_sub(1),
            hop_count: self.hop_count.saturating_add(1),
            ..self.clone()
        }
    }
}
