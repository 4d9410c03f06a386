//! Reference routers: Epidemic, Binary Spray & Wait, FirstContact and
//! Direct Delivery.
//!
//! These are decision functions only. The engine owns buffers and links,
//! feeds in the current contacts and applies the returned transfers.

use std::collections::BTreeSet;

use crate::bundle::{BundleId, NodeId};

/// Copies handed out per bundle by Binary Spray & Wait.
pub const DEFAULT_SPRAY_TICKETS: u32 = 18;

/// Spray & Wait ticket count carried by one copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SprayState {
    pub bundle_id: BundleId,
    /// Always ≥ 1; a copy holding one ticket is in the wait phase.
    pub tickets: u32,
}

impl SprayState {
    pub fn new(bundle_id: BundleId, tickets: u32) -> Self {
        assert!(tickets >= 1, "a spray copy holds at least one ticket");
        Self { bundle_id, tickets }
    }

    pub fn is_waiting(&self) -> bool {
        self.tickets == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SprayDecision {
    pub transfer: bool,
    pub keep: u32,
    pub give: u32,
}

/// Binary Spray & Wait step for a contact that lacks the bundle.
///
/// The destination always gets the bundle and consumes no tickets. Any
/// other peer gets half the tickets (rounded down) while the holder still
/// has more than one.
pub fn snw_forward(state: &SprayState, peer: NodeId, destination: NodeId) -> SprayDecision {
    let n = state.tickets;
    if peer == destination {
        SprayDecision { transfer: true, keep: n, give: 0 }
    } else if n > 1 {
        SprayDecision { transfer: true, keep: n.div_ceil(2), give: n / 2 }
    } else {
        SprayDecision { transfer: false, keep: n, give: 0 }
    }
}

/// Every node that has held a FirstContact bundle, in visiting order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FcRecordVector {
    pub bundle_id: BundleId,
    pub visited: Vec<NodeId>,
}

impl FcRecordVector {
    pub fn new(bundle_id: BundleId, source: NodeId) -> Self {
        Self { bundle_id, visited: vec![source] }
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.visited.contains(&node)
    }

    /// Record `node` as the new holder. Returns `false` if it was already
    /// on the list.
    pub fn visit(&mut self, node: NodeId) -> bool {
        if self.contains(node) {
            return false;
        }
        self.visited.push(node);
        true
    }
}

/// A currently open link as seen from one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub peer: NodeId,
    /// Seconds; when the link came up.
    pub since: f64,
}

/// FirstContact: the destination if present, otherwise the
/// earliest-established unvisited contact (lowest EID on ties).
pub fn fc_forward(
    record: &FcRecordVector,
    destination: NodeId,
    contacts: &[Contact],
) -> Option<NodeId> {
    if contacts.iter().any(|c| c.peer == destination) {
        return Some(destination);
    }
    contacts
        .iter()
        .filter(|c| !record.contains(c.peer))
        .min_by(|a, b| a.since.total_cmp(&b.since).then(a.peer.cmp(&b.peer)))
        .map(|c| c.peer)
}

/// Direct Delivery: hand over only to the destination itself.
pub fn dd_forward(destination: NodeId, contacts: &[Contact]) -> Option<NodeId> {
    contacts.iter().any(|c| c.peer == destination).then_some(destination)
}

/// One side of an Epidemic anti-entropy session.
#[derive(Debug, Clone, Default)]
pub struct EpidemicPeer {
    pub eid: NodeId,
    /// Buffered bundles in buffer order, with their destinations.
    pub held: Vec<(BundleId, NodeId)>,
    /// Everything the node would refuse: held plus already received as
    /// destination.
    pub summary: BTreeSet<BundleId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Offer {
    pub from: NodeId,
    pub to: NodeId,
    pub bundle: BundleId,
}

/// Both directions of the summary-vector difference. Bundles addressed to
/// the peer come first on each side.
pub fn epidemic_exchange(a: &EpidemicPeer, b: &EpidemicPeer) -> Vec<Offer> {
    let mut offers = epidemic_offers(a, b);
    offers.extend(epidemic_offers(b, a));
    offers
}

/// The `from → to` half of [`epidemic_exchange`]: bundles `to` does not
/// advertise, those addressed to `to` first.
pub fn epidemic_offers(from: &EpidemicPeer, to: &EpidemicPeer) -> Vec<Offer> {
    let missing = from.held.iter().filter(|(id, _)| !to.summary.contains(id));
    let (direct, other): (Vec<_>, Vec<_>) = missing.partition(|(_, dest)| *dest == to.eid);
    direct
        .into_iter()
        .chain(other)
        .map(|&(bundle, _)| Offer { from: from.eid, to: to.eid, bundle })
        .collect()
}
