//! Event accounting and the three headline metrics.
//!
//! The event log is the single source of truth: reports are computed from
//! it, and its line format parses back to the same log.

use std::fmt::{self, Write as _};
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::bundle::{BundleId, NodeId};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("cannot aggregate an empty set of reports")]
    Empty,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// A source generated a bundle (`from` = source, `to` = destination).
    Created,
    /// A transfer began draining on a link.
    Started,
    /// A transfer completed; `hop` is the receiver copy's hop count.
    Relayed,
    /// First arrival at the destination.
    Delivered,
    /// A transfer was cut short; nothing was installed.
    Aborted,
    /// Evicted from `from`'s full buffer.
    Dropped,
    /// Deleted at `from` by the redundancy purge, triggered by `to`.
    Purged,
    /// Removed from `from` when the TTL ran out.
    Expired,
}

impl EventKind {
    pub const ALL: [EventKind; 8] = [
        EventKind::Created,
        EventKind::Started,
        EventKind::Relayed,
        EventKind::Delivered,
        EventKind::Aborted,
        EventKind::Dropped,
        EventKind::Purged,
        EventKind::Expired,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Created => "created",
            EventKind::Started => "started",
            EventKind::Relayed => "relayed",
            EventKind::Delivered => "delivered",
            EventKind::Aborted => "aborted",
            EventKind::Dropped => "dropped",
            EventKind::Purged => "purged",
            EventKind::Expired => "expired",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown event kind {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    /// Seconds.
    pub time: f64,
    pub kind: EventKind,
    pub bundle: BundleId,
    pub from: Option<NodeId>,
    pub to: Option<NodeId>,
    pub hop: Option<u32>,
}

/// Ordered event stream of one run, with running counters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<Event>,
    created: u64,
    relayed: u64,
    delivered: u64,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: Event) {
        match event.kind {
            EventKind::Created => self.created += 1,
            EventKind::Relayed => self.relayed += 1,
            EventKind::Delivered => self.delivered += 1,
            _ => {}
        }
        self.events.push(event);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn created(&self) -> u64 {
        self.created
    }

    pub fn relayed(&self) -> u64 {
        self.relayed
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// One event per line: `time kind bundle from to hop`, `-` for absent
    /// fields, preceded by a `#` header line.
    pub fn write_to(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "# time kind bundle from to hop")?;
        let mut line = String::new();
        for e in &self.events {
            line.clear();
            let _ = write!(line, "{} {} {}", e.time, e.kind, e.bundle.0);
            for field in [e.from.map(|n| n.0), e.to.map(|n| n.0), e.hop] {
                match field {
                    Some(v) => {
                        let _ = write!(line, " {v}");
                    }
                    None => line.push_str(" -"),
                }
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_from(input: impl BufRead) -> Result<Self, MetricsError> {
        let mut log = EventLog::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| MetricsError::Parse { line: idx + 1, reason };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(err(format!("expected 6 fields, found {}", fields.len())));
            }
            let opt = |s: &str| -> Result<Option<u32>, MetricsError> {
                if s == "-" {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|e| err(format!("{s:?}: {e}")))
                }
            };
            log.push(Event {
                time: fields[0].parse().map_err(|e| err(format!("time: {e}")))?,
                kind: fields[1].parse().map_err(err)?,
                bundle: BundleId(fields[2].parse().map_err(|e| err(format!("bundle: {e}")))?),
                from: opt(fields[3])?.map(NodeId),
                to: opt(fields[4])?.map(NodeId),
                hop: opt(fields[5])?,
            });
        }
        Ok(log)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub created: u64,
    pub relayed: u64,
    pub delivered: u64,
    /// delivered / created; 0 when nothing was created.
    pub delivery_ratio: f64,
    /// Hop counts of delivered copies summed, over created.
    pub avg_hop_count: f64,
    /// Same sum over delivered; `None` when nothing was delivered.
    pub avg_hop_per_delivered: Option<f64>,
    /// (relayed − delivered) / delivered; `None` when nothing was delivered.
    pub overhead_ratio: Option<f64>,
    pub observed_max_hop: u32,
}

pub fn compute_report(log: &EventLog) -> MetricsReport {
    let (created, relayed, delivered) = (log.created(), log.relayed(), log.delivered());
    let hops: Vec<u32> = log
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::Delivered)
        .map(|e| e.hop.unwrap_or(0))
        .collect();
    let total_hops: u64 = hops.iter().map(|&h| u64::from(h)).sum();
    let ratio = |num: f64, den: u64| if den == 0 { 0.0 } else { num / den as f64 };
    let defined = |v: f64| (delivered > 0).then_some(v);
    MetricsReport {
        created,
        relayed,
        delivered,
        delivery_ratio: ratio(delivered as f64, created),
        avg_hop_count: ratio(total_hops as f64, created),
        avg_hop_per_delivered: defined(ratio(total_hops as f64, delivered)),
        overhead_ratio: defined(ratio(relayed as f64 - delivered as f64, delivered)),
        observed_max_hop: hops.into_iter().max().unwrap_or(0),
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    /// `None` for an empty sample. A single sample has deviation 0.
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Some(Stat { mean, sd })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    pub runs: usize,
    pub delivery_ratio: Stat,
    pub avg_hop_count: Stat,
    pub avg_hop_per_delivered: Option<Stat>,
    pub overhead_ratio: Option<Stat>,
    /// Runs whose overhead ratio was undefined and left out of the mean.
    pub overhead_undefined: usize,
    /// Largest delivered hop count over all runs.
    pub observed_max_hop: u32,
    pub created: f64,
    pub relayed: f64,
    pub delivered: f64,
}

pub fn aggregate(reports: &[MetricsReport]) -> Result<AggregateReport, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::Empty);
    }
    let col = |f: &dyn Fn(&MetricsReport) -> f64| -> Vec<f64> { reports.iter().map(f).collect() };
    let overheads: Vec<f64> = reports.iter().filter_map(|r| r.overhead_ratio).collect();
    let per_delivered: Vec<f64> = reports.iter().filter_map(|r| r.avg_hop_per_delivered).collect();
    let mean = |v: Vec<f64>| Stat::of(&v).map_or(0.0, |s| s.mean);
    Ok(AggregateReport {
        runs: reports.len(),
        delivery_ratio: Stat::of(&col(&|r| r.delivery_ratio)).expect("non-empty"),
        avg_hop_count: Stat::of(&col(&|r| r.avg_hop_count)).expect("non-empty"),
        avg_hop_per_delivered: Stat::of(&per_delivered),
        overhead_ratio: Stat::of(&overheads),
        overhead_undefined: reports.len() - overheads.len(),
        observed_max_hop: reports.iter().map(|r| r.observed_max_hop).max().unwrap_or(0),
        created: mean(col(&|r| r.created as f64)),
        relayed: mean(col(&|r| r.relayed as f64)),
        delivered: mean(col(&|r| r.delivered as f64)),
    })
}

/// Marker written for undefined values in the tables.
pub const UNDEFINED: &str = "NA";

fn fmt_f(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), fmt_f)
}

/// Header of the per-run table; the second column is named after the swept
/// parameter.
pub fn run_table_header(parameter: &str) -> String {
    format!(
        "protocol,{parameter},seed,delivery_ratio,avg_hop_count,avg_hop_per_delivered,\
         overhead_ratio,observed_max_hop,created,relayed,delivered"
    )
}

pub fn run_table_row(protocol: &str, value: &str, seed: u64, r: &MetricsReport) -> String {
    format!(
        "{protocol},{value},{seed},{},{},{},{},{},{},{},{}",
        fmt_f(r.delivery_ratio),
        fmt_f(r.avg_hop_count),
        fmt_opt(r.avg_hop_per_delivered),
        fmt_opt(r.overhead_ratio),
        r.observed_max_hop,
        r.created,
        r.relayed,
        r.delivered,
    )
}

/// Header of the aggregated table: means with a `_sd` column after each
/// metric.
pub fn aggregate_table_header(parameter: &str) -> String {
    format!(
        "protocol,{parameter},runs,delivery_ratio,delivery_ratio_sd,avg_hop_count,\
         avg_hop_count_sd,avg_hop_per_delivered,avg_hop_per_delivered_sd,overhead_ratio,\
         overhead_ratio_sd,overhead_undefined,observed_max_hop,created,relayed,delivered"
    )
}

pub fn aggregate_table_row(protocol: &str, value: &str, a: &AggregateReport) -> String {
    format!(
        "{protocol},{value},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        a.runs,
        fmt_f(a.delivery_ratio.mean),
        fmt_f(a.delivery_ratio.sd),
        fmt_f(a.avg_hop_count.mean),
        fmt_f(a.avg_hop_count.sd),
        fmt_opt(a.avg_hop_per_delivered.map(|s| s.mean)),
        fmt_opt(a.avg_hop_per_delivered.map(|s| s.sd)),
        fmt_opt(a.overhead_ratio.map(|s| s.mean)),
        fmt_opt(a.overhead_ratio.map(|s| s.sd)),
        a.overhead_undefined,
        a.observed_max_hop,
        fmt_f(a.created),
        fmt_f(a.relayed),
        fmt_f(a.delivered),
    )
}
