//! Identifiers and the per-node copy of a bundle.

use std::fmt;

use crate::baselines::{FcRecordVector, SprayState};
use crate::geometry::Position;
use crate::grone::GeoState;

/// Endpoint identifier of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BundleId(pub u32);

impl fmt::Display for BundleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

/// Immutable description of a message, shared by all of its copies.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub id: BundleId,
    pub source: NodeId,
    pub destination: NodeId,
    /// Bytes.
    pub size: u64,
    /// Seconds.
    pub created_at: f64,
    /// Seconds.
    pub ttl: f64,
    /// Where the source was when it created the bundle.
    pub source_position: Position,
}

impl Bundle {
    pub fn is_expired(&self, now: f64) -> bool {
        now - self.created_at > self.ttl + 1e-9
    }

    /// Source or destination of this bundle.
    pub fn is_endpoint(&self, node: NodeId) -> bool {
        node == self.source || node == self.destination
    }
}

/// Routing bookkeeping that travels with (or is derived for) one copy.
#[derive(Debug, Clone, PartialEq)]
pub enum CopyState {
    /// Epidemic and Direct Delivery keep nothing per copy.
    Plain,
    Geo(GeoState),
    Spray(SprayState),
    FirstContact(FcRecordVector),
}

/// One node's copy of a bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleCopy {
    pub bundle: Bundle,
    /// Transfers this copy has gone through since the source; 0 at the source.
    pub hop_count: u32,
    /// Seconds; when this copy entered the holder's buffer.
    pub received_at: f64,
    pub state: CopyState,
}

impl BundleCopy {
    pub fn id(&self) -> BundleId {
        self.bundle.id
    }

    pub fn size(&self) -> u64 {
        self.bundle.size
    }

    pub fn geo(&self) -> Option<&GeoState> {
        match &self.state {
            CopyState::Geo(g) => Some(g),
            _ => None,
        }
    }

    pub fn geo_mut(&mut self) -> Option<&mut GeoState> {
        match &mut self.state {
            CopyState::Geo(g) => Some(g),
            _ => None,
        }
    }

    pub fn spray(&self) -> Option<&SprayState> {
        match &self.state {
            CopyState::Spray(s) => Some(s),
            _ => None,
        }
    }

    pub fn record_vector(&self) -> Option<&FcRecordVector> {
        match &self.state {
            CopyState::FirstContact(r) => Some(r),
            _ => None,
        }
    }
}
