//! Geographic routing on one-hop information.
//!
//! Every node beacons a Hello carrying its EID, position and summary
//! vector. The neighbor table built from those beacons is the only routing
//! state. A copy spreads away from its anchor: the deciding node splits its
//! forward half-disc into two quarter-sectors and picks the best-scoring
//! neighbor in each. Two holders of the same bundle that come closer than
//! the purge distance drop one of the two copies.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

use crate::bundle::{Bundle, BundleCopy, BundleId, NodeId};
use crate::geometry::{
    direction_cosine, distance, forward_sector_of, lens_fraction, Position, Sector, SectorFrame,
};

/// Slack applied to time comparisons; simulated times are multiples of a
/// decimal clock step and carry rounding noise.
const TIME_EPS: f64 = 1e-6;

/// Consecutive Hellos an entry may miss before it is dropped.
pub const MAX_MISSED_HELLOS: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroneError {
    #[error("candidate at {distance} m is beyond the radio range {radius} m")]
    OutOfRange { distance: f64, radius: f64 },
    #[error("candidate lies behind the deciding node")]
    BehindApex,
    #[error("invalid protocol configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroneConfig {
    /// Radio range R, meters.
    pub radius: f64,
    /// Seconds between Hellos of one node.
    pub hello_interval: f64,
    /// Holders closer than this purge one copy. Defaults to R/2.
    pub purge_distance: f64,
}

impl GroneConfig {
    pub fn new(radius: f64, hello_interval: f64) -> Result<Self, GroneError> {
        Self::with_purge_distance(radius, hello_interval, radius / 2.0)
    }

    pub fn with_purge_distance(
        radius: f64,
        hello_interval: f64,
        purge_distance: f64,
    ) -> Result<Self, GroneError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GroneError::Config(format!("radius must be positive, got {radius}")));
        }
        if !(hello_interval > 0.0 && hello_interval.is_finite()) {
            return Err(GroneError::Config(format!(
                "hello interval must be positive, got {hello_interval}"
            )));
        }
        if !(purge_distance > 0.0 && purge_distance < radius) {
            return Err(GroneError::Config(format!(
                "purge distance must lie in (0, {radius}), got {purge_distance}"
            )));
        }
        Ok(Self { radius, hello_interval, purge_distance })
    }

    /// Share of a node's coverage disc that two holders at exactly the
    /// purge distance have in common (the 2-Margin).
    pub fn two_margin(&self) -> f64 {
        lens_fraction(self.purge_distance, self.radius).expect("validated config")
    }
}

/// Beacon broadcast by every node once per Hello interval.
#[derive(Debug, Clone, PartialEq)]
pub struct HelloMessage {
    pub sender: NodeId,
    pub sender_position: Position,
    /// Bundles the sender holds or has already received as destination.
    pub summary_vector: BTreeSet<BundleId>,
    /// Bundles the sender purged as redundant. Receivers do not offer them
    /// back; they play no part in purge decisions.
    pub released: BTreeSet<BundleId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborEntry {
    pub eid: NodeId,
    pub position: Position,
    pub last_hello_time: f64,
    pub missed_count: u32,
    /// Summary vector from the latest Hello.
    pub summary: BTreeSet<BundleId>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NeighborTable {
    entries: BTreeMap<NodeId, NeighborEntry>,
}

impl NeighborTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, eid: NodeId) -> Option<&NeighborEntry> {
        self.entries.get(&eid)
    }

    pub fn contains(&self, eid: NodeId) -> bool {
        self.entries.contains_key(&eid)
    }

    /// Entries in ascending EID order.
    pub fn iter(&self) -> impl Iterator<Item = &NeighborEntry> {
        self.entries.values()
    }

    /// Whether the neighbor advertised `bundle` in its latest Hello.
    pub fn advertises(&self, eid: NodeId, bundle: BundleId) -> bool {
        self.entries.get(&eid).is_some_and(|e| e.summary.contains(&bundle))
    }

    /// Insert or refresh the entry for `hello.sender`. Returns `true` when
    /// the neighbor was not in the table.
    pub fn upsert(&mut self, hello: &HelloMessage, now: f64) -> bool {
        let fresh = NeighborEntry {
            eid: hello.sender,
            position: hello.sender_position,
            last_hello_time: now,
            missed_count: 0,
            summary: hello.summary_vector.clone(),
        };
        self.entries.insert(hello.sender, fresh).is_none()
    }
}

/// Per-copy geographic state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeoState {
    /// Position the copy spreads away from. `None` only on a fresh copy at
    /// its source before the first hand-off.
    pub anchor: Option<Position>,
    /// Neighbors this holder has already handed the copy to.
    pub replicated_to: BTreeSet<NodeId>,
}

/// Utility of relaying to `candidate` from the apex of `frame`.
///
/// Half of the score rewards distance (R scores 1/2), the other half
/// rewards alignment with the bisector of the candidate's sector
/// (on-bisector scores 1/2, sector edge scores 0).
pub fn utility(frame: &SectorFrame, candidate: Position) -> Result<f64, GroneError> {
    let d = distance(frame.apex, candidate);
    if d > frame.radius * (1.0 + 1e-12) {
        return Err(GroneError::OutOfRange { distance: d, radius: frame.radius });
    }
    let bisector = frame
        .bisector(forward_sector_of(frame, candidate))
        .ok_or(GroneError::BehindApex)?;
    let cos = direction_cosine(frame.apex.to(candidate), bisector);
    Ok(d / (2.0 * frame.radius) + (1.0 + FRAC_1_SQRT_2) * (cos - FRAC_1_SQRT_2))
}

/// The two positions a utility-maximizing relay would pick: distance R
/// along each bisector of the frame spreading away from `anchor`.
pub fn ideal_relay_positions(anchor: Position, apex: Position, radius: f64) -> [Position; 2] {
    let frame = SectorFrame::away_from(anchor, apex, radius);
    [
        apex.offset(frame.bisector_a.scale(radius)),
        apex.offset(frame.bisector_b.scale(radius)),
    ]
}

/// Distance between the inner relays of two peers whose common
/// predecessor sees them at half-angle `theta` (0 ≤ θ ≤ π/4).
pub fn inner_relay_gap(theta: f64, radius: f64) -> f64 {
    2f64.sqrt() * radius - 2.0 * radius * (theta + PI / 4.0).cos()
}

/// Whether `eid` may receive a new replica of `copy` from the holder.
fn eligible(table: &NeighborTable, copy: &BundleCopy, eid: NodeId) -> bool {
    let bundle = &copy.bundle;
    eid != bundle.source
        && !table.advertises(eid, bundle.id)
        && !copy.geo().is_some_and(|g| g.replicated_to.contains(&eid))
}

/// Nearest neighbor for the source's first hand-off.
///
/// Requires the holder to be the source, the copy to have no anchor yet,
/// and at least two live neighbors. Ties on distance go to the smaller EID.
pub fn bootstrap_source(
    holder: NodeId,
    holder_position: Position,
    table: &NeighborTable,
    copy: &BundleCopy,
    radius: f64,
) -> Option<NodeId> {
    if holder != copy.bundle.source
        || copy.geo().is_some_and(|g| g.anchor.is_some())
        || table.len() < 2
    {
        return None;
    }
    table
        .iter()
        .filter(|e| eligible(table, copy, e.eid))
        .map(|e| (distance(holder_position, e.position), e.eid))
        .filter(|(d, _)| *d <= radius)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, eid)| eid)
}

/// Best neighbor per forward sector, at most one each.
pub fn select_relays(
    holder_position: Position,
    table: &NeighborTable,
    copy: &BundleCopy,
    radius: f64,
) -> Vec<(NodeId, Sector)> {
    let Some(anchor) = copy.geo().and_then(|g| g.anchor) else {
        return Vec::new();
    };
    if table.len() < 2 || table.contains(copy.bundle.destination) {
        return Vec::new();
    }
    let frame = SectorFrame::away_from(anchor, holder_position, radius);
    let mut best: BTreeMap<Sector, (f64, NodeId)> = BTreeMap::new();
    for entry in table.iter().filter(|e| eligible(table, copy, e.eid)) {
        let sector = forward_sector_of(&frame, entry.position);
        if sector == Sector::Outside {
            continue;
        }
        let Ok(score) = utility(&frame, entry.position) else {
            continue;
        };
        // Ascending EID iteration: only a strictly better score displaces.
        best.entry(sector)
            .and_modify(|cur| {
                if score > cur.0 {
                    *cur = (score, entry.eid);
                }
            })
            .or_insert((score, entry.eid));
    }
    best.into_iter().map(|(sector, (_, eid))| (eid, sector)).collect()
}

/// Single-neighbor fallback: hand the copy over regardless of geometry.
pub fn naive_replicate(table: &NeighborTable, copy: &BundleCopy) -> Option<NodeId> {
    if table.len() != 1 {
        return None;
    }
    let only = table.iter().next()?.eid;
    eligible(table, copy, only).then_some(only)
}

/// Result of processing one Hello.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HelloOutcome {
    /// The sender was not in the table before this Hello.
    pub new_neighbor: bool,
    /// Bundles the receiver must delete from its buffer.
    pub purged: Vec<BundleId>,
}

/// Refresh the sender's entry and apply the redundancy purge.
///
/// When the two nodes are closer than the purge distance, every bundle in
/// both summaries is deleted on exactly one side. Sources and destinations
/// never delete; between two ordinary holders the larger EID deletes. Each
/// side reaches the same verdict from the Hello alone.
pub fn on_hello<'a>(
    table: &mut NeighborTable,
    receiver: NodeId,
    receiver_position: Position,
    held: impl IntoIterator<Item = &'a Bundle>,
    hello: &HelloMessage,
    now: f64,
    config: &GroneConfig,
) -> HelloOutcome {
    let new_neighbor = table.upsert(hello, now);
    let mut purged = Vec::new();
    if hello.sender != receiver
        && distance(receiver_position, hello.sender_position) < config.purge_distance
    {
        for bundle in held {
            if hello.summary_vector.contains(&bundle.id)
                && should_yield(bundle, receiver, hello.sender)
            {
                purged.push(bundle.id);
            }
        }
    }
    HelloOutcome { new_neighbor, purged }
}

/// Whether `me` drops its copy of `bundle` in favor of `other`'s.
pub fn should_yield(bundle: &Bundle, me: NodeId, other: NodeId) -> bool {
    !bundle.is_endpoint(me) && (bundle.is_endpoint(other) || me > other)
}

/// Age the table by one Hello interval. Entries that have now missed more
/// than [`MAX_MISSED_HELLOS`] Hellos are removed and returned.
pub fn expire_neighbors(table: &mut NeighborTable, now: f64, hello_interval: f64) -> Vec<NodeId> {
    let mut removed = Vec::new();
    table.entries.retain(|eid, entry| {
        if now - entry.last_hello_time >= hello_interval - TIME_EPS {
            entry.missed_count += 1;
        }
        let keep = entry.missed_count <= MAX_MISSED_HELLOS;
        if !keep {
            removed.push(*eid);
        }
        keep
    });
    removed
}

/// Copies whose destination is a live neighbor that has not yet got them.
pub fn deliver_pass<'a>(
    table: &NeighborTable,
    buffer: impl IntoIterator<Item = &'a BundleCopy>,
) -> Vec<(BundleId, NodeId)> {
    buffer
        .into_iter()
        .filter(|c| {
            let dest = c.bundle.destination;
            table.contains(dest) && !table.advertises(dest, c.id())
        })
        .map(|c| (c.id(), c.bundle.destination))
        .collect()
}

/// What a holder does with one copy on a protocol tick.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Hold,
    Deliver(NodeId),
    Bootstrap(NodeId),
    Naive(NodeId),
    Relays(Vec<(NodeId, Sector)>),
}

/// Replication decision for a copy that is not directly deliverable.
pub fn decide_replication(
    holder: NodeId,
    holder_position: Position,
    table: &NeighborTable,
    copy: &BundleCopy,
    radius: f64,
) -> Decision {
    let anchored = copy.geo().is_some_and(|g| g.anchor.is_some());
    match table.len() {
        0 => Decision::Hold,
        1 => naive_replicate(table, copy).map_or(Decision::Hold, Decision::Naive),
        _ if !anchored => bootstrap_source(holder, holder_position, table, copy, radius)
            .map_or(Decision::Hold, Decision::Bootstrap),
        _ => {
            let relays = select_relays(holder_position, table, copy, radius);
            if relays.is_empty() {
                Decision::Hold
            } else {
                Decision::Relays(relays)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::CopyState;
    use crate::geometry::Vec2;
    use proptest::prelude::*;

    const R: f64 = 100.0;

    fn bundle(id: u32, source: u32, dest: u32) -> Bundle {
        Bundle {
            id: BundleId(id),
            source: NodeId(source),
            destination: NodeId(dest),
            size: 500_000,
            created_at: 0.0,
            ttl: 1200.0,
            source_position: Position::new(0.0, 0.0),
        }
    }

    fn copy_with(b: Bundle, anchor: Option<Position>) -> BundleCopy {
        BundleCopy {
            bundle: b,
            hop_count: 1,
            received_at: 0.0,
            state: CopyState::Geo(GeoState { anchor, replicated_to: BTreeSet::new() }),
        }
    }

    fn hello(sender: u32, pos: Position, held: &[u32]) -> HelloMessage {
        HelloMessage {
            sender: NodeId(sender),
            sender_position: pos,
            summary_vector: held.iter().map(|&i| BundleId(i)).collect(),
            released: BTreeSet::new(),
        }
    }

    fn table_of(entries: &[(u32, Position)]) -> NeighborTable {
        let mut t = NeighborTable::new();
        for &(eid, pos) in entries {
            t.upsert(&hello(eid, pos, &[]), 0.0);
        }
        t
    }

    /// Frame at the origin spreading along +x.
    fn east_frame() -> SectorFrame {
        SectorFrame::new(Position::new(0.0, 0.0), Vec2::new(1.0, 0.0), R)
    }

    fn polar(r: f64, angle: f64) -> Position {
        Position::new(0.0, 0.0).offset(Vec2::from_angle(angle).scale(r))
    }

    #[test]
    fn worked_utility_values() {
        let f = east_frame();
        let best = utility(&f, polar(R, PI / 4.0)).unwrap();
        assert!((best - 1.0).abs() < 1e-12);
        let worst = utility(&f, polar(0.0, 0.0)).unwrap();
        assert!(worst.abs() < 1e-12);
        // 30° off the bisector at R/2: cos = √3/2.
        let a = utility(&f, polar(R / 2.0, PI / 4.0 - PI / 6.0)).unwrap();
        assert!((a - 0.5213).abs() < 1e-3, "{a}");
        // Sector edge at distance R.
        let b = utility(&f, polar(R, PI / 2.0)).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
        assert!(best > a && a > b && b > worst);
    }

    #[test]
    fn utility_rejects_out_of_range_and_backward() {
        let f = east_frame();
        assert!(matches!(utility(&f, polar(R * 1.01, 0.3)), Err(GroneError::OutOfRange { .. })));
        assert_eq!(utility(&f, polar(R / 2.0, PI)), Err(GroneError::BehindApex));
    }

    #[test]
    fn config_validation() {
        assert!(GroneConfig::new(100.0, 1.0).is_ok());
        assert!(GroneConfig::with_purge_distance(100.0, 1.0, 100.0).is_err());
        assert!(GroneConfig::with_purge_distance(100.0, 1.0, 0.0).is_err());
        assert!(GroneConfig::new(0.0, 1.0).is_err());
        assert!(GroneConfig::new(100.0, 0.0).is_err());
        let m = GroneConfig::new(100.0, 1.0).unwrap().two_margin();
        assert!((0.68..=0.70).contains(&m));
    }

    #[test]
    fn bootstrap_picks_nearest() {
        let me = Position::new(0.0, 0.0);
        let t = table_of(&[(1, Position::new(70.0, 0.0)), (2, Position::new(0.0, 30.0))]);
        let c = copy_with(bundle(0, 0, 9), None);
        assert_eq!(bootstrap_source(NodeId(0), me, &t, &c, R), Some(NodeId(2)));
    }

    #[test]
    fn bootstrap_needs_two_neighbors_and_source() {
        let me = Position::new(0.0, 0.0);
        let single = table_of(&[(1, Position::new(30.0, 0.0))]);
        let c = copy_with(bundle(0, 0, 9), None);
        assert_eq!(bootstrap_source(NodeId(0), me, &single, &c, R), None);
        assert_eq!(decide_replication(NodeId(0), me, &single, &c, R), Decision::Naive(NodeId(1)));
        let two = table_of(&[(1, Position::new(30.0, 0.0)), (2, Position::new(50.0, 0.0))]);
        let not_source = copy_with(bundle(0, 5, 9), None);
        assert_eq!(bootstrap_source(NodeId(0), me, &two, &not_source, R), None);
    }

    #[test]
    fn bootstrap_tie_breaks_on_eid() {
        let me = Position::new(0.0, 0.0);
        let t = table_of(&[(7, Position::new(40.0, 0.0)), (3, Position::new(-40.0, 0.0))]);
        let c = copy_with(bundle(0, 0, 9), None);
        assert_eq!(bootstrap_source(NodeId(0), me, &t, &c, R), Some(NodeId(3)));
    }

    #[test]
    fn select_one_relay_per_sector() {
        let me = Position::new(0.0, 0.0);
        let anchor = Position::new(-50.0, 0.0);
        let t = table_of(&[
            (1, polar(80.0, PI / 4.0)),
            (2, polar(80.0, -PI / 4.0)),
            (3, polar(40.0, PI / 3.0)),
        ]);
        let c = copy_with(bundle(0, 8, 9), Some(anchor));
        let got = select_relays(me, &t, &c, R);
        assert_eq!(got, vec![(NodeId(1), Sector::A), (NodeId(2), Sector::B)]);
    }

    #[test]
    fn select_prefers_bisector_over_edge() {
        let me = Position::new(0.0, 0.0);
        let anchor = Position::new(-50.0, 0.0);
        // Same sector: on-bisector at R scores 1.0, on the edge at R 0.5.
        let t = table_of(&[(1, polar(R, PI / 2.0)), (2, polar(R, PI / 4.0))]);
        let c = copy_with(bundle(0, 8, 9), Some(anchor));
        assert_eq!(select_relays(me, &t, &c, R), vec![(NodeId(2), Sector::A)]);
    }

    #[test]
    fn select_ignores_backward_neighbors() {
        let me = Position::new(0.0, 0.0);
        let anchor = Position::new(-50.0, 0.0);
        let t = table_of(&[(1, polar(60.0, 0.75 * PI)), (2, polar(90.0, -0.6 * PI))]);
        let c = copy_with(bundle(0, 8, 9), Some(anchor));
        assert!(select_relays(me, &t, &c, R).is_empty());
    }

    #[test]
    fn select_skips_source_replicated_and_holders() {
        let me = Position::new(0.0, 0.0);
        let anchor = Position::new(-50.0, 0.0);
        let mut t = table_of(&[
            (1, polar(90.0, PI / 4.0)),
            (2, polar(90.0, -PI / 4.0)),
            (3, polar(50.0, PI / 4.0)),
            (4, polar(50.0, -PI / 4.0)),
        ]);
        t.upsert(&hello(3, polar(50.0, PI / 4.0), &[0]), 0.0);
        let mut c = copy_with(bundle(0, 1, 9), Some(anchor));
        c.geo_mut().unwrap().replicated_to.insert(NodeId(2));
        // 1 is the source, 2 already got it, 3 advertises it.
        assert_eq!(select_relays(me, &t, &c, R), vec![(NodeId(4), Sector::B)]);
    }

    #[test]
    fn naive_examples() {
        let c = copy_with(bundle(0, 8, 9), Some(Position::new(0.0, 0.0)));
        let t = table_of(&[(1, polar(R / 2.0, 0.0))]);
        assert_eq!(naive_replicate(&t, &c), Some(NodeId(1)));
        let mut done = c.clone();
        done.geo_mut().unwrap().replicated_to.insert(NodeId(1));
        assert_eq!(naive_replicate(&t, &done), None);
        assert_eq!(naive_replicate(&NeighborTable::new(), &c), None);
        let src = copy_with(bundle(0, 1, 9), Some(Position::new(0.0, 0.0)));
        assert_eq!(naive_replicate(&t, &src), None);
    }

    #[test]
    fn hello_purge_examples() {
        let cfg = GroneConfig::new(R, 1.0).unwrap();
        let m1 = bundle(1, 50, 60);
        let me = Position::new(0.0, 0.0);
        let mut t = NeighborTable::new();
        let out = on_hello(&mut t, NodeId(5), me, [&m1], &hello(3, polar(0.4 * R, 1.0), &[1]), 0.0, &cfg);
        assert!(out.new_neighbor);
        assert_eq!(out.purged, vec![BundleId(1)]);

        let mut t = NeighborTable::new();
        let out = on_hello(&mut t, NodeId(5), me, [&m1], &hello(3, polar(0.6 * R, 1.0), &[1]), 0.0, &cfg);
        assert!(out.purged.is_empty());

        // Smaller EID keeps its copy.
        let mut t = NeighborTable::new();
        let out = on_hello(&mut t, NodeId(2), me, [&m1], &hello(3, polar(0.4 * R, 1.0), &[1]), 0.0, &cfg);
        assert!(out.purged.is_empty());
    }

    #[test]
    fn hello_purge_respects_source_in_both_orders() {
        let cfg = GroneConfig::new(R, 1.0).unwrap();
        let close = polar(0.4 * R, 2.0);
        let origin = Position::new(0.0, 0.0);
        for (src, other) in [(2u32, 7u32), (7, 2)] {
            let m = bundle(1, src, 99);
            let mut t = NeighborTable::new();
            let at_src = on_hello(&mut t, NodeId(src), origin, [&m], &hello(other, close, &[1]), 0.0, &cfg);
            let mut t = NeighborTable::new();
            let at_other = on_hello(&mut t, NodeId(other), close, [&m], &hello(src, origin, &[1]), 0.0, &cfg);
            assert!(at_src.purged.is_empty());
            assert_eq!(at_other.purged, vec![BundleId(1)]);
        }
    }

    #[test]
    fn expiry_boundary() {
        let mut t = NeighborTable::new();
        t.upsert(&hello(4, Position::new(1.0, 1.0), &[]), 0.0);
        assert!(expire_neighbors(&mut t, 1.0, 1.0).is_empty());
        assert_eq!(t.get(NodeId(4)).unwrap().missed_count, 1);
        assert!(expire_neighbors(&mut t, 2.0, 1.0).is_empty());
        assert_eq!(t.get(NodeId(4)).unwrap().missed_count, 2);
        assert_eq!(expire_neighbors(&mut t, 3.0, 1.0), vec![NodeId(4)]);
        assert!(t.is_empty());
        // Revival.
        t.upsert(&hello(4, Position::new(1.0, 1.0), &[]), 3.5);
        assert_eq!(t.get(NodeId(4)).unwrap().missed_count, 0);
    }

    #[test]
    fn expiry_skips_fresh_entries() {
        let mut t = NeighborTable::new();
        t.upsert(&hello(4, Position::new(1.0, 1.0), &[]), 0.3);
        for k in 1..10 {
            let now = k as f64;
            assert!(expire_neighbors(&mut t, now + 0.2, 1.0).is_empty());
            t.upsert(&hello(4, Position::new(1.0, 1.0), &[]), now + 0.3);
        }
        assert_eq!(t.get(NodeId(4)).unwrap().missed_count, 0);
    }

    #[test]
    fn deliver_pass_examples() {
        let t = table_of(&[(9, polar(10.0, 0.0)), (3, polar(20.0, 1.0))]);
        let a = copy_with(bundle(1, 0, 9), None);
        let b = copy_with(bundle(2, 0, 9), None);
        let c = copy_with(bundle(3, 0, 4), None);
        let got = deliver_pass(&t, [&a, &b, &c]);
        assert_eq!(got, vec![(BundleId(1), NodeId(9)), (BundleId(2), NodeId(9))]);
        let mut t2 = t.clone();
        t2.upsert(&hello(9, polar(10.0, 0.0), &[1]), 0.0);
        assert_eq!(deliver_pass(&t2, [&a, &b]), vec![(BundleId(2), NodeId(9))]);
    }

    #[test]
    fn trapezoid_gap_matches_construction() {
        // Predecessor A on the +x axis; its two relays M, N sit at ±θ as seen
        // from source S at the origin. Each spreads away from S, so their
        // inner relays face each other.
        for theta in [0.05, 0.2, 0.4, 0.6, PI / 4.0] {
            let dist = R / (2.0 * theta.sin()) * 2f64.sqrt();
            let m = polar(dist, theta);
            let n = polar(dist, -theta);
            let s = Position::new(0.0, 0.0);
            let m_inner = ideal_relay_positions(s, m, R)[1];
            let n_inner = ideal_relay_positions(s, n, R)[0];
            let gap = distance(m_inner, n_inner);
            // |MN| = √2 R by construction of the relays.
            assert!((distance(m, n) - 2f64.sqrt() * R).abs() < 1e-9);
            assert!((gap - inner_relay_gap(theta, R)).abs() < 1e-9, "θ={theta}: {gap}");
        }
    }

    proptest! {
        #[test]
        fn utility_bounded_in_sector(angle in 0.0f64..(PI / 2.0), frac in 0.0f64..=1.0) {
            let f = east_frame();
            for a in [angle, -angle] {
                let u = utility(&f, polar(frac * R, a)).unwrap();
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&u));
            }
        }

        #[test]
        fn utility_increases_with_distance(angle in 0.0f64..(PI / 2.0), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            prop_assume!((a - b).abs() > 1e-6);
            let f = east_frame();
            let (near, far) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(utility(&f, polar(far * R, angle)).unwrap() > utility(&f, polar(near * R, angle)).unwrap());
        }

        #[test]
        fn utility_increases_toward_bisector(off_a in 0.0f64..(PI / 4.0), off_b in 0.0f64..(PI / 4.0), frac in 0.05f64..1.0) {
            prop_assume!((off_a - off_b).abs() > 1e-6);
            let f = east_frame();
            let (close, wide) = if off_a < off_b { (off_a, off_b) } else { (off_b, off_a) };
            let u_close = utility(&f, polar(frac * R, PI / 4.0 + close)).unwrap();
            let u_wide = utility(&f, polar(frac * R, PI / 4.0 + wide)).unwrap();
            prop_assert!(u_close > u_wide);
        }

        #[test]
        fn select_relays_invariants(
            pts in proptest::collection::vec((0.0f64..R, 0.0f64..std::f64::consts::TAU), 2..12),
            replicated in proptest::collection::btree_set(1u32..12, 0..4),
            source in 1u32..12,
        ) {
            let entries: Vec<(u32, Position)> = pts.iter().enumerate()
                .map(|(i, &(r, a))| (i as u32 + 1, polar(r, a))).collect();
            let t = table_of(&entries);
            let mut c = copy_with(bundle(0, source, 999), Some(Position::new(-30.0, 10.0)));
            c.geo_mut().unwrap().replicated_to = replicated.iter().map(|&i| NodeId(i)).collect();
            let got = select_relays(Position::new(0.0, 0.0), &t, &c, R);
            prop_assert!(got.len() <= 2);
            let sectors: BTreeSet<_> = got.iter().map(|(_, s)| *s).collect();
            prop_assert_eq!(sectors.len(), got.len());
            for (eid, s) in &got {
                prop_assert!(*s != Sector::Outside);
                prop_assert!(*eid != NodeId(source));
                prop_assert!(!replicated.contains(&eid.0));
            }
        }

        #[test]
        fn purge_never_drops_both(
            a in 0u32..50, b in 0u32..50,
            buf_a in proptest::collection::btree_set(0u32..20, 0..10),
            buf_b in proptest::collection::btree_set(0u32..20, 0..10),
            endpoints in proptest::collection::vec((0u32..50, 0u32..50), 20),
        ) {
            prop_assume!(a != b);
            let cfg = GroneConfig::new(R, 1.0).unwrap();
            let bundles: Vec<Bundle> = endpoints.iter().enumerate()
                .map(|(i, &(s, d))| bundle(i as u32, s, d)).collect();
            let held_a: Vec<&Bundle> = buf_a.iter().map(|&i| &bundles[i as usize]).collect();
            let held_b: Vec<&Bundle> = buf_b.iter().map(|&i| &bundles[i as usize]).collect();
            let pa = Position::new(0.0, 0.0);
            let pb = Position::new(0.3 * R, 0.0);
            let hello_a = hello(a, pa, &buf_a.iter().copied().collect::<Vec<_>>());
            let hello_b = hello(b, pb, &buf_b.iter().copied().collect::<Vec<_>>());
            let mut ta = NeighborTable::new();
            let mut tb = NeighborTable::new();
            let del_a = on_hello(&mut ta, NodeId(a), pa, held_a, &hello_b, 0.0, &cfg).purged;
            let del_b = on_hello(&mut tb, NodeId(b), pb, held_b, &hello_a, 0.0, &cfg).purged;
            for id in buf_a.intersection(&buf_b) {
                let id = BundleId(*id);
                prop_assert!(!(del_a.contains(&id) && del_b.contains(&id)));
            }
        }
    }
}
