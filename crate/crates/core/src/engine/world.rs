//! The tick loop.
//!
//! Every tick runs the same phases in the same order: mobility, link
//! detection, Hello exchange, neighbor expiry, routing decisions, transfer
//! progress, TTL expiry and traffic generation. Nodes and links are always
//! visited in ascending EID order so a run is a pure function of its
//! scenario.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::buffer::{Buffer, InsertOutcome};
use super::mobility::{Bounds, Walker};
use super::rng::{stream, Purpose, GLOBAL_STREAM};
use super::scenario::{Protocol, Scenario, ScenarioError};
use crate::baselines::{
    dd_forward, epidemic_offers, fc_forward, snw_forward, Contact, EpidemicPeer,
    FcRecordVector, SprayState,
};
use crate::bundle::{Bundle, BundleCopy, BundleId, CopyState, NodeId};
use crate::geometry::Position;
use crate::grone::{self, Decision, GeoState, GroneConfig, HelloMessage, NeighborTable};
use crate::metrics::{Event, EventKind, EventLog};

#[derive(Debug, Clone)]
pub struct NodeState {
    pub eid: NodeId,
    pub walker: Walker,
    pub buffer: Buffer,
    /// Only maintained under GRONE.
    pub table: NeighborTable,
    /// Bundles this node has received as their destination.
    pub delivered: BTreeSet<BundleId>,
    /// Bundles purged here as redundant, with the time they expire.
    pub released: BTreeMap<BundleId, f64>,
    /// Tick offset of this node's Hello within each interval.
    pub hello_phase: u64,
    rng: ChaCha8Rng,
}

impl NodeState {
    pub fn position(&self) -> Position {
        self.walker.position
    }

    /// Held bundles plus those already received as destination.
    pub fn summary(&self) -> BTreeSet<BundleId> {
        self.buffer.ids().chain(self.delivered.iter().copied()).collect()
    }

    fn lacks(&self, bundle: BundleId) -> bool {
        !self.buffer.contains(bundle) && !self.delivered.contains(&bundle)
    }
}

/// One bundle moving over one directed link.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub from: NodeId,
    pub to: NodeId,
    pub bundle: BundleId,
    pub bytes_remaining: u64,
    pub started_at: f64,
    expires_after: f64,
}

#[derive(Debug, Clone, Default)]
struct Channel {
    active: Option<Transfer>,
    queue: VecDeque<BundleId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mobility {
    RandomWalk,
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorldOptions {
    pub mobility: Mobility,
    /// Generate bundles every message interval.
    pub traffic: bool,
}

impl Default for WorldOptions {
    fn default() -> Self {
        Self { mobility: Mobility::RandomWalk, traffic: true }
    }
}

/// Run a scenario to completion and return its event log.
pub fn run(scenario: &Scenario) -> Result<EventLog, ScenarioError> {
    let mut world = World::new(scenario.clone())?;
    world.run_to_end();
    Ok(world.into_log())
}

#[derive(Debug, Clone)]
pub struct World {
    scenario: Scenario,
    options: WorldOptions,
    grone: GroneConfig,
    bounds: Bounds,
    nodes: Vec<NodeState>,
    /// Unordered pairs (smaller EID first) → time the link came up.
    links: BTreeMap<(NodeId, NodeId), f64>,
    contacts: Vec<Vec<Contact>>,
    channels: BTreeMap<(NodeId, NodeId), Channel>,
    tick: u64,
    total_ticks: u64,
    hello_ticks: u64,
    message_ticks: u64,
    bytes_per_tick: u64,
    traffic_rng: ChaCha8Rng,
    next_bundle: u32,
    log: EventLog,
}

impl World {
    /// Nodes placed uniformly at random, Random Walk mobility, periodic
    /// traffic.
    pub fn new(scenario: Scenario) -> Result<Self, ScenarioError> {
        Self::build(scenario, None, WorldOptions::default())
    }

    /// Nodes at the given positions; EIDs follow the slice order.
    pub fn with_layout(
        mut scenario: Scenario,
        positions: &[Position],
        options: WorldOptions,
    ) -> Result<Self, ScenarioError> {
        scenario.node_count = positions.len() as u32;
        Self::build(scenario, Some(positions), options)
    }

    fn build(
        scenario: Scenario,
        layout: Option<&[Position]>,
        options: WorldOptions,
    ) -> Result<Self, ScenarioError> {
        scenario.validate()?;
        let grone = GroneConfig::new(scenario.radius, scenario.hello_interval).map_err(|e| {
            ScenarioError::Invalid { field: "transmission_range", reason: e.to_string() }
        })?;
        let bounds = Bounds { width: scenario.world_width, height: scenario.world_height };
        let hello_ticks = scenario.ticks(scenario.hello_interval).max(1);
        let legs = scenario.walk_leg_range;
        let nodes = (0..scenario.node_count)
            .map(|i| {
                let eid = NodeId(i);
                let mut rng = stream(scenario.seed, u64::from(i), Purpose::Mobility);
                let walker = match (layout, options.mobility) {
                    (None, _) => Walker::spawn(&bounds, legs, &mut rng),
                    (Some(p), Mobility::RandomWalk) => {
                        let mut w = Walker::spawn(&bounds, legs, &mut rng);
                        w.position = p[i as usize];
                        w
                    }
                    (Some(p), Mobility::Stationary) => Walker::parked(p[i as usize]),
                };
                let hello_phase = stream(scenario.seed, u64::from(i), Purpose::HelloPhase)
                    .gen_range(0..hello_ticks);
                NodeState {
                    eid,
                    walker,
                    buffer: Buffer::new(eid, scenario.buffer_size),
                    table: NeighborTable::new(),
                    delivered: BTreeSet::new(),
                    released: BTreeMap::new(),
                    hello_phase,
                    rng,
                }
            })
            .collect::<Vec<_>>();
        Ok(Self {
            options,
            grone,
            bounds,
            contacts: vec![Vec::new(); nodes.len()],
            nodes,
            links: BTreeMap::new(),
            channels: BTreeMap::new(),
            tick: 0,
            total_ticks: scenario.total_ticks(),
            hello_ticks,
            message_ticks: scenario.ticks(scenario.message_interval).max(1),
            bytes_per_tick: scenario.bytes_per_tick(),
            traffic_rng: stream(scenario.seed, GLOBAL_STREAM, Purpose::Traffic),
            next_bundle: 0,
            log: EventLog::new(),
            scenario,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Simulated seconds at the end of the current tick.
    pub fn now(&self) -> f64 {
        self.tick as f64 * self.scenario.clock_step
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.total_ticks
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn node(&self, eid: NodeId) -> &NodeState {
        &self.nodes[eid.0 as usize]
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn into_log(self) -> EventLog {
        self.log
    }

    /// Currently linked unordered pairs, smaller EID first.
    pub fn links(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.links.keys().copied()
    }

    pub fn active_transfers(&self) -> impl Iterator<Item = &Transfer> {
        self.channels.values().filter_map(|c| c.active.as_ref())
    }

    /// Number of buffered copies of `bundle` across all nodes.
    pub fn copies_of(&self, bundle: BundleId) -> usize {
        self.nodes.iter().filter(|n| n.buffer.contains(bundle)).count()
    }

    /// Spray tickets held across all buffered copies of `bundle`.
    pub fn tickets_of(&self, bundle: BundleId) -> u32 {
        self.nodes
            .iter()
            .filter_map(|n| n.buffer.get(bundle)?.spray().map(|s| s.tickets))
            .sum()
    }

    /// Bundles created so far.
    pub fn bundles_created(&self) -> u32 {
        self.next_bundle
    }

    /// Move a node by hand; meant for constructed test layouts.
    pub fn set_position(&mut self, eid: NodeId, position: Position) {
        self.nodes[eid.0 as usize].walker.position = position;
    }

    pub fn run_to_end(&mut self) {
        while !self.is_finished() {
            self.step();
        }
    }

    /// Advance one clock step.
    pub fn step(&mut self) {
        self.tick += 1;
        let now = self.now();
        if self.options.mobility == Mobility::RandomWalk {
            self.move_nodes();
        }
        self.detect_links(now);
        if self.scenario.protocol == Protocol::Grone {
            self.exchange_hellos(now);
            self.expire_neighbors(now);
        }
        self.route(now);
        self.step_transfers(now);
        self.expire_ttl(now);
        if self.options.traffic && self.tick % self.message_ticks == 0 {
            self.generate_traffic();
        }
    }

    fn emit(&mut self, kind: EventKind, bundle: BundleId, from: NodeId, to: Option<NodeId>, hop: Option<u32>) {
        self.log.push(Event { time: self.now(), kind, bundle, from: Some(from), to, hop });
    }

    fn move_nodes(&mut self) {
        let s = &self.scenario;
        for node in &mut self.nodes {
            node.walker.step(s.node_speed, s.clock_step, &self.bounds, s.walk_leg_range, &mut node.rng);
        }
    }

    fn detect_links(&mut self, now: f64) {
        let r2 = self.scenario.radius * self.scenario.radius;
        let mut current = BTreeMap::new();
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                if a.position().to(b.position()).norm_squared() <= r2 {
                    let key = (a.eid, b.eid);
                    current.insert(key, self.links.get(&key).copied().unwrap_or(now));
                }
            }
        }
        let broken: Vec<_> = self.links.keys().filter(|k| !current.contains_key(k)).copied().collect();
        for (a, b) in broken {
            for key in [(a, b), (b, a)] {
                if let Some(t) = self.channels.remove(&key).and_then(|c| c.active) {
                    self.emit(EventKind::Aborted, t.bundle, t.from, Some(t.to), None);
                }
            }
        }
        self.links = current;
        for list in &mut self.contacts {
            list.clear();
        }
        for (&(a, b), &since) in &self.links {
            self.contacts[a.0 as usize].push(Contact { peer: b, since });
            self.contacts[b.0 as usize].push(Contact { peer: a, since });
        }
        for list in &mut self.contacts {
            list.sort_by_key(|c| c.peer);
        }
    }

    fn exchange_hellos(&mut self, now: f64) {
        let phase = self.tick % self.hello_ticks;
        let hellos: Vec<HelloMessage> = self
            .nodes
            .iter()
            .filter(|n| n.hello_phase == phase)
            .map(|n| HelloMessage {
                sender: n.eid,
                sender_position: n.position(),
                summary_vector: n.summary(),
                released: n.released.keys().copied().collect(),
            })
            .collect();
        for hello in &hellos {
            let receivers: Vec<NodeId> =
                self.contacts[hello.sender.0 as usize].iter().map(|c| c.peer).collect();
            for receiver in receivers {
                let node = &mut self.nodes[receiver.0 as usize];
                let position = node.position();
                let outcome = grone::on_hello(
                    &mut node.table,
                    receiver,
                    position,
                    node.buffer.iter().map(|c| &c.bundle),
                    hello,
                    now,
                    &self.grone,
                );
                for id in outcome.purged {
                    let node = &mut self.nodes[receiver.0 as usize];
                    if let Some(copy) = node.buffer.remove(id) {
                        node.released.insert(id, copy.bundle.created_at + copy.bundle.ttl);
                        self.emit(EventKind::Purged, id, receiver, Some(hello.sender), None);
                    }
                }
                // A peer seen holding a bundle, or that gave it up as
                // redundant, is never offered it again.
                let buffer = &mut self.nodes[receiver.0 as usize].buffer;
                for &id in hello.summary_vector.iter().chain(&hello.released) {
                    if let Some(geo) = buffer.get_mut(id).and_then(BundleCopy::geo_mut) {
                        geo.replicated_to.insert(hello.sender);
                    }
                }
            }
        }
    }

    fn expire_neighbors(&mut self, now: f64) {
        let phase = self.tick % self.hello_ticks;
        let interval = self.scenario.hello_interval;
        for node in self.nodes.iter_mut().filter(|n| n.hello_phase == phase) {
            grone::expire_neighbors(&mut node.table, now, interval);
        }
    }

    fn route(&mut self, _now: f64) {
        let mut requests: Vec<(NodeId, NodeId, BundleId)> = Vec::new();
        match self.scenario.protocol {
            Protocol::Grone => self.plan_grone(&mut requests),
            Protocol::Epidemic => self.plan_epidemic(&mut requests),
            Protocol::SprayAndWait => self.plan_spray(&mut requests),
            Protocol::FirstContact => self.plan_first_contact(&mut requests),
            Protocol::DirectDelivery => self.plan_direct(&mut requests),
        }
        for (from, to, bundle) in requests {
            self.schedule(from, to, bundle);
        }
    }

    fn plan_grone(&self, out: &mut Vec<(NodeId, NodeId, BundleId)>) {
        let radius = self.scenario.radius;
        for node in &self.nodes {
            let deliverable = grone::deliver_pass(&node.table, node.buffer.iter());
            for &(bundle, dest) in &deliverable {
                out.push((node.eid, dest, bundle));
            }
            for copy in node.buffer.iter() {
                if deliverable.iter().any(|(id, _)| *id == copy.id())
                    || self.has_pending_outbound(node.eid, copy.id())
                {
                    continue;
                }
                let targets = match grone::decide_replication(
                    node.eid,
                    node.position(),
                    &node.table,
                    copy,
                    radius,
                ) {
                    Decision::Hold => Vec::new(),
                    Decision::Deliver(t) | Decision::Bootstrap(t) | Decision::Naive(t) => vec![t],
                    Decision::Relays(relays) => relays.into_iter().map(|(t, _)| t).collect(),
                };
                out.extend(targets.into_iter().map(|t| (node.eid, t, copy.id())));
            }
        }
    }

    fn plan_epidemic(&self, out: &mut Vec<(NodeId, NodeId, BundleId)>) {
        if self.links.is_empty() {
            return;
        }
        let peers: Vec<EpidemicPeer> = self
            .nodes
            .iter()
            .map(|n| EpidemicPeer {
                eid: n.eid,
                held: n.buffer.iter().map(|c| (c.id(), c.bundle.destination)).collect(),
                summary: n.summary(),
            })
            .collect();
        // A direction is re-offered only once its channel has drained, so a
        // busy link does not recompute the same offers every tick.
        for &(a, b) in self.links.keys() {
            for (from, to) in [(a, b), (b, a)] {
                if self.channels.contains_key(&(from, to)) {
                    continue;
                }
                let offers = epidemic_offers(&peers[from.0 as usize], &peers[to.0 as usize]);
                out.extend(offers.into_iter().map(|o| (o.from, o.to, o.bundle)));
            }
        }
    }

    fn plan_spray(&self, out: &mut Vec<(NodeId, NodeId, BundleId)>) {
        for node in &self.nodes {
            let contacts = &self.contacts[node.eid.0 as usize];
            if contacts.is_empty() {
                continue;
            }
            for copy in node.buffer.iter() {
                let dest = copy.bundle.destination;
                if dd_forward(dest, contacts).is_some() {
                    if self.node(dest).lacks(copy.id()) {
                        out.push((node.eid, dest, copy.id()));
                    }
                    continue;
                }
                let Some(state) = copy.spray() else { continue };
                if state.is_waiting() || self.has_pending_outbound(node.eid, copy.id()) {
                    continue;
                }
                let target = contacts.iter().map(|c| c.peer).find(|&p| {
                    self.node(p).lacks(copy.id()) && snw_forward(state, p, dest).transfer
                });
                if let Some(peer) = target {
                    out.push((node.eid, peer, copy.id()));
                }
            }
        }
    }

    fn plan_first_contact(&self, out: &mut Vec<(NodeId, NodeId, BundleId)>) {
        for node in &self.nodes {
            let contacts = &self.contacts[node.eid.0 as usize];
            if contacts.is_empty() {
                continue;
            }
            for copy in node.buffer.iter() {
                let Some(record) = copy.record_vector() else { continue };
                if self.has_pending_outbound(node.eid, copy.id()) {
                    continue;
                }
                if let Some(peer) = fc_forward(record, copy.bundle.destination, contacts) {
                    out.push((node.eid, peer, copy.id()));
                }
            }
        }
    }

    fn plan_direct(&self, out: &mut Vec<(NodeId, NodeId, BundleId)>) {
        for node in &self.nodes {
            let contacts = &self.contacts[node.eid.0 as usize];
            for copy in node.buffer.iter() {
                if let Some(dest) = dd_forward(copy.bundle.destination, contacts) {
                    out.push((node.eid, dest, copy.id()));
                }
            }
        }
    }

    fn has_pending_outbound(&self, from: NodeId, bundle: BundleId) -> bool {
        self.channels
            .range((from, NodeId(0))..=(from, NodeId(u32::MAX)))
            .any(|(_, ch)| {
                ch.active.as_ref().is_some_and(|t| t.bundle == bundle) || ch.queue.contains(&bundle)
            })
    }

    /// Queue `bundle` on the `from → to` link. Refused when the pair is not
    /// linked, the sender lacks the bundle, the receiver already has it, or
    /// it is already queued on that link.
    pub fn schedule(&mut self, from: NodeId, to: NodeId, bundle: BundleId) -> bool {
        let pair = if from < to { (from, to) } else { (to, from) };
        if from == to
            || !self.links.contains_key(&pair)
            || !self.node(from).buffer.contains(bundle)
            || !self.node(to).lacks(bundle)
        {
            return false;
        }
        let ch = self.channels.entry((from, to)).or_default();
        if ch.active.as_ref().is_some_and(|t| t.bundle == bundle) || ch.queue.contains(&bundle) {
            return false;
        }
        ch.queue.push_back(bundle);
        true
    }

    fn step_transfers(&mut self, now: f64) {
        let keys: Vec<(NodeId, NodeId)> = self.channels.keys().copied().collect();
        for key in keys {
            let mut finished = None;
            let mut aborted = None;
            {
                let ch = self.channels.get_mut(&key).expect("key collected above");
                if let Some(t) = ch.active.as_mut() {
                    if !can_transfer(&self.nodes, t.from, t.to, t.bundle) {
                        aborted = ch.active.take();
                    } else {
                        t.bytes_remaining -= t.bytes_remaining.min(self.bytes_per_tick);
                        if t.bytes_remaining == 0 {
                            finished = ch.active.take();
                        }
                    }
                }
            }
            if let Some(t) = aborted {
                self.emit(EventKind::Aborted, t.bundle, t.from, Some(t.to), None);
            }
            if let Some(t) = finished {
                self.complete(&t, now);
            }
            let mut started = None;
            if let Some(ch) = self.channels.get_mut(&key) {
                if ch.active.is_none() {
                    while let Some(bundle) = ch.queue.pop_front() {
                        if !can_transfer(&self.nodes, key.0, key.1, bundle) {
                            continue;
                        }
                        let copy = self.nodes[key.0 .0 as usize].buffer.get(bundle).expect("checked");
                        ch.active = Some(Transfer {
                            from: key.0,
                            to: key.1,
                            bundle,
                            bytes_remaining: copy.size(),
                            started_at: now,
                            expires_after: copy.bundle.created_at + copy.bundle.ttl,
                        });
                        started = Some(bundle);
                        break;
                    }
                }
            }
            if let Some(bundle) = started {
                self.emit(EventKind::Started, bundle, key.0, Some(key.1), None);
            }
        }
        self.channels.retain(|_, ch| ch.active.is_some() || !ch.queue.is_empty());
    }

    fn complete(&mut self, t: &Transfer, now: f64) {
        let (from, to) = (t.from.0 as usize, t.to.0 as usize);
        let Some(sent) = self.nodes[from].buffer.get(t.bundle).cloned() else {
            return;
        };
        let hop = sent.hop_count + 1;
        let dest = sent.bundle.destination;
        let to_is_dest = t.to == dest;
        let sender_position = self.nodes[from].position();
        let receiver_position = self.nodes[to].position();
        self.emit(EventKind::Relayed, t.bundle, t.from, Some(t.to), Some(hop));

        let receiver_state = match (&sent.state, self.scenario.protocol) {
            (CopyState::Geo(_), _) => {
                let copy = self.nodes[from].buffer.get_mut(t.bundle).expect("held");
                if let Some(geo) = copy.geo_mut() {
                    geo.replicated_to.insert(t.to);
                    geo.anchor.get_or_insert(receiver_position);
                }
                CopyState::Geo(GeoState { anchor: Some(sender_position), replicated_to: BTreeSet::new() })
            }
            (CopyState::Spray(state), _) => {
                let decision = snw_forward(state, t.to, dest);
                if !to_is_dest {
                    let copy = self.nodes[from].buffer.get_mut(t.bundle).expect("held");
                    if let CopyState::Spray(s) = &mut copy.state {
                        s.tickets = decision.keep;
                    }
                }
                CopyState::Spray(SprayState::new(t.bundle, decision.give.max(1)))
            }
            (CopyState::FirstContact(record), _) => {
                let mut record = record.clone();
                record.visit(t.to);
                self.nodes[from].buffer.remove(t.bundle);
                CopyState::FirstContact(record)
            }
            (CopyState::Plain, _) => CopyState::Plain,
        };

        if to_is_dest {
            if self.nodes[to].delivered.insert(t.bundle) {
                self.emit(EventKind::Delivered, t.bundle, t.from, Some(t.to), Some(hop));
            }
            return;
        }
        let copy = BundleCopy { bundle: sent.bundle, hop_count: hop, received_at: now, state: receiver_state };
        self.store(t.to, copy);
    }

    fn store(&mut self, at: NodeId, copy: BundleCopy) {
        self.nodes[at.0 as usize].released.remove(&copy.id());
        let outcome = self.nodes[at.0 as usize]
            .buffer
            .insert(copy)
            .expect("message size validated against buffer size");
        if let InsertOutcome::Inserted { evicted } = outcome {
            for gone in evicted {
                self.emit(EventKind::Dropped, gone.id(), at, None, None);
            }
        }
    }

    fn expire_ttl(&mut self, now: f64) {
        for i in 0..self.nodes.len() {
            self.nodes[i].released.retain(|_, expiry| now - *expiry <= 1e-9);
            let gone = self.nodes[i].buffer.remove_where(|c| c.bundle.is_expired(now));
            for copy in gone {
                self.emit(EventKind::Expired, copy.id(), NodeId(i as u32), None, None);
            }
        }
        let mut cut = Vec::new();
        for ch in self.channels.values_mut() {
            if ch.active.as_ref().is_some_and(|t| now - t.expires_after > 1e-9) {
                cut.extend(ch.active.take());
            }
        }
        for t in cut {
            self.emit(EventKind::Aborted, t.bundle, t.from, Some(t.to), None);
        }
    }

    fn generate_traffic(&mut self) {
        let n = self.nodes.len() as u32;
        let source = self.traffic_rng.gen_range(0..n);
        let mut dest = self.traffic_rng.gen_range(0..n - 1);
        if dest >= source {
            dest += 1;
        }
        self.originate(NodeId(source), NodeId(dest));
    }

    /// Place `copy` straight into a node's buffer; for hand-built layouts.
    /// Bundle ids issued later by traffic skip past it.
    pub fn inject(&mut self, at: NodeId, copy: BundleCopy) {
        self.next_bundle = self.next_bundle.max(copy.id().0 + 1);
        self.store(at, copy);
    }

    /// Create a bundle at `source` for `destination` at the current time.
    pub fn originate(&mut self, source: NodeId, destination: NodeId) -> BundleId {
        assert_ne!(source, destination, "a bundle needs distinct endpoints");
        let id = BundleId(self.next_bundle);
        self.next_bundle += 1;
        let now = self.now();
        let bundle = Bundle {
            id,
            source,
            destination,
            size: self.scenario.message_size,
            created_at: now,
            ttl: self.scenario.ttl,
            source_position: self.node(source).position(),
        };
        let state = match self.scenario.protocol {
            Protocol::Grone => CopyState::Geo(GeoState::default()),
            Protocol::SprayAndWait => CopyState::Spray(SprayState::new(id, self.scenario.spray_tickets)),
            Protocol::FirstContact => CopyState::FirstContact(FcRecordVector::new(id, source)),
            Protocol::Epidemic | Protocol::DirectDelivery => CopyState::Plain,
        };
        self.emit(EventKind::Created, id, source, Some(destination), Some(0));
        self.store(source, BundleCopy { bundle, hop_count: 0, received_at: now, state });
        id
    }
}

fn can_transfer(nodes: &[NodeState], from: NodeId, to: NodeId, bundle: BundleId) -> bool {
    nodes[from.0 as usize].buffer.contains(bundle) && nodes[to.0 as usize].lacks(bundle)
}
