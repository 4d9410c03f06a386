//! Multi-seed parameter sweeps and result tables.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use super::config::{parse_quantity, Dimension};
use crate::engine::{Protocol, Scenario, ScenarioError, World};
use crate::metrics::{
    aggregate, aggregate_table_header, aggregate_table_row, compute_report, run_table_header,
    run_table_row, AggregateReport, MetricsReport,
};

pub const RUNS_FILE: &str = "runs.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const FAILURES_FILE: &str = "failures.txt";
pub const LOG_DIR: &str = "logs";

/// Seeds used when none are given.
pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Spec(String),
    #[error("{parameter}={value}: {source}")]
    Scenario { parameter: SweepParameter, value: f64, source: ScenarioError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{failed} of {total} runs failed; see {manifest}")]
    RunsFailed { failed: usize, total: usize, manifest: PathBuf },
    #[error("thread pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SweepError + '_ {
    move |source| SweepError::Io { path: path.to_path_buf(), source }
}

/// A swept setting. Values are written in the unit the tables use: seconds
/// for intervals, MB for buffers, m/s, meters, a node count, hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    MessageInterval,
    BufferSize,
    NodeSpeed,
    Radius,
    NodeCount,
    SimDuration,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 6] = [
        SweepParameter::MessageInterval,
        SweepParameter::BufferSize,
        SweepParameter::NodeSpeed,
        SweepParameter::Radius,
        SweepParameter::NodeCount,
        SweepParameter::SimDuration,
    ];

    /// Column name in the result tables.
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::MessageInterval => "message_interval",
            SweepParameter::BufferSize => "buffer_size",
            SweepParameter::NodeSpeed => "node_speed",
            SweepParameter::Radius => "radius_R",
            SweepParameter::NodeCount => "node_count",
            SweepParameter::SimDuration => "sim_duration",
        }
    }

    fn dimension(self) -> (Dimension, f64) {
        match self {
            SweepParameter::MessageInterval => (Dimension::Time, 1.0),
            SweepParameter::BufferSize => (Dimension::Size, 1e6),
            SweepParameter::NodeSpeed => (Dimension::Speed, 1.0),
            SweepParameter::Radius => (Dimension::Length, 1.0),
            SweepParameter::NodeCount => (Dimension::Count, 1.0),
            SweepParameter::SimDuration => (Dimension::Time, 3600.0),
        }
    }

    /// Parse one value, accepting the same unit suffixes as scenario files,
    /// and return it in table units.
    pub fn parse_value(self, text: &str) -> Result<f64, String> {
        let (dim, scale) = self.dimension();
        let v = if dim == Dimension::Count {
            text.trim().parse::<u32>().map_err(|_| format!("expected a node count, got {text:?}"))?
                as f64
        } else {
            parse_quantity(text, dim, scale)? / scale
        };
        Ok(v)
    }

    /// Current value of this setting in `s`, in table units.
    pub fn value_in(self, s: &Scenario) -> f64 {
        match self {
            SweepParameter::MessageInterval => s.message_interval,
            SweepParameter::BufferSize => s.buffer_size as f64 / 1e6,
            SweepParameter::NodeSpeed => s.node_speed,
            SweepParameter::Radius => s.radius,
            SweepParameter::NodeCount => s.node_count as f64,
            SweepParameter::SimDuration => s.sim_duration / 3600.0,
        }
    }

    /// `base` with this setting replaced by `value` (table units).
    pub fn apply(self, base: &Scenario, value: f64) -> Scenario {
        let mut s = base.clone();
        match self {
            SweepParameter::MessageInterval => s.message_interval = value,
            SweepParameter::BufferSize => s.buffer_size = (value * 1e6).round() as u64,
            SweepParameter::NodeSpeed => s.node_speed = value,
            SweepParameter::Radius => s.radius = value,
            SweepParameter::NodeCount => s.node_count = value as u32,
            SweepParameter::SimDuration => s.sim_duration = value * 3600.0,
        }
        s
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        let found = match key.as_str() {
            "message_interval" | "interval" => SweepParameter::MessageInterval,
            "buffer_size" | "node_buffer_size" | "buffer" => SweepParameter::BufferSize,
            "node_speed" | "node_moving_speed" | "speed" => SweepParameter::NodeSpeed,
            "radius_r" | "radius" | "transmission_range" | "range" => SweepParameter::Radius,
            "node_count" | "number_of_nodes" | "nodes" => SweepParameter::NodeCount,
            "sim_duration" | "simulation_time" => SweepParameter::SimDuration,
            _ => return Err(format!("unknown sweep parameter {s:?}")),
        };
        Ok(found)
    }
}

/// Parse `param=v1,v2,...`.
pub fn parse_sweep_arg(arg: &str) -> Result<(SweepParameter, Vec<f64>), String> {
    let (name, values) = arg.split_once('=').ok_or("expected param=v1,v2,...")?;
    let parameter: SweepParameter = name.parse()?;
    let values = values
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| parameter.parse_value(v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((parameter, values))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub protocols: Vec<Protocol>,
}

impl SweepSpec {
    /// One point: the base value of `parameter`.
    pub fn single(base: Scenario, parameter: SweepParameter) -> Self {
        Self {
            values: vec![parameter.value_in(&base)],
            protocols: vec![base.protocol],
            seeds: vec![base.seed],
            base,
            parameter,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.values.is_empty() {
            return Err(SweepError::Spec("no sweep values".into()));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(SweepError::Spec("sweep values must be strictly increasing".into()));
        }
        if self.seeds.is_empty() {
            return Err(SweepError::Spec("no seeds".into()));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return Err(SweepError::Spec("seeds must be distinct".into()));
        }
        if self.protocols.is_empty() {
            return Err(SweepError::Spec("no protocols".into()));
        }
        for p in 1..self.protocols.len() {
            if self.protocols[..p].contains(&self.protocols[p]) {
                return Err(SweepError::Spec(format!("protocol {} listed twice", self.protocols[p])));
            }
        }
        if self.parameter == SweepParameter::NodeCount
            && self.values.iter().any(|v| v.fract() != 0.0)
        {
            return Err(SweepError::Spec("node counts must be integers".into()));
        }
        for &value in &self.values {
            self.parameter
                .apply(&self.base, value)
                .validate()
                .map_err(|source| SweepError::Scenario { parameter: self.parameter, value, source })?;
        }
        Ok(())
    }

    /// Every run in table order: protocol, then value, then seed.
    pub fn jobs(&self) -> Vec<Job> {
        let mut jobs = Vec::new();
        for &protocol in &self.protocols {
            for &value in &self.values {
                for &seed in &self.seeds {
                    let scenario =
                        self.parameter.apply(&self.base, value).with_protocol(protocol).with_seed(seed);
                    jobs.push(Job { protocol, value, seed, scenario });
                }
            }
        }
        jobs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub protocol: Protocol,
    pub value: f64,
    pub seed: u64,
    pub scenario: Scenario,
}

impl Job {
    fn log_name(&self, parameter: SweepParameter) -> String {
        format!("{}_{}-{}_seed{}.log", self.protocol, parameter, self.value, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub protocol: Protocol,
    pub value: f64,
    pub seed: u64,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub protocol: Protocol,
    pub value: f64,
    pub aggregate: AggregateReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResults {
    pub runs: Vec<RunResult>,
    pub points: Vec<PointResult>,
}

impl SweepResults {
    pub fn point(&self, protocol: Protocol, value: f64) -> Option<&AggregateReport> {
        self.points
            .iter()
            .find(|p| p.protocol == protocol && p.value == value)
            .map(|p| &p.aggregate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Write one event log per run under `logs/`.
    pub verbose: bool,
    /// Concurrent runs; 0 means one per available core.
    pub jobs: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { verbose: false, jobs: 0 }
    }
}

fn execute(job: &Job, log_path: Option<&Path>) -> Result<MetricsReport, String> {
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| -> Result<_, String> {
        let mut world = World::new(job.scenario.clone()).map_err(|e| e.to_string())?;
        world.run_to_end();
        let log = world.into_log();
        if let Some(path) = log_path {
            let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut out = BufWriter::new(file);
            log.write_to(&mut out)
                .and_then(|_| out.flush())
                .map_err(|e| format!("{}: {e}", path.display()))?;
        }
        Ok(compute_report(&log))
    }));
    match outcome {
        Ok(r) => r,
        Err(payload) => Err(payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "run panicked".to_string())),
    }
}

/// Run every (protocol, value, seed) combination of `spec` and write
/// `runs.csv` and `aggregate.csv` into `out_dir`. If any run fails, the
/// tables still hold every completed run and `failures.txt` lists the rest.
pub fn run_sweep(
    spec: &SweepSpec,
    out_dir: &Path,
    options: SweepOptions,
) -> Result<SweepResults, SweepError> {
    spec.validate()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let log_dir = out_dir.join(LOG_DIR);
    if options.verbose {
        fs::create_dir_all(&log_dir).map_err(io_err(&log_dir))?;
    }
    let jobs = spec.jobs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    let outcomes: Vec<Result<MetricsReport, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let log_path = options.verbose.then(|| log_dir.join(job.log_name(spec.parameter)));
                execute(job, log_path.as_deref())
            })
            .collect()
    });

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (job, outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(report) => runs.push(RunResult {
                protocol: job.protocol,
                value: job.value,
                seed: job.seed,
                report,
            }),
            Err(reason) => failures.push((job, reason)),
        }
    }

    let mut points = Vec::new();
    for &protocol in &spec.protocols {
        for &value in &spec.values {
            let reports: Vec<MetricsReport> = runs
                .iter()
                .filter(|r| r.protocol == protocol && r.value == value)
                .map(|r| r.report.clone())
                .collect();
            if let Ok(aggregate) = aggregate(&reports) {
                points.push(PointResult { protocol, value, aggregate });
            }
        }
    }

    let name = spec.parameter.name();
    let mut run_table = run_table_header(name);
    for r in &runs {
        run_table.push('\n');
        run_table.push_str(&run_table_row(r.protocol.name(), &r.value.to_string(), r.seed, &r.report));
    }
    run_table.push('\n');
    let mut agg_table = aggregate_table_header(name);
    for p in &points {
        agg_table.push('\n');
        agg_table.push_str(&aggregate_table_row(p.protocol.name(), &p.value.to_string(), &p.aggregate));
    }
    agg_table.push('\n');
    for (file, body) in [(RUNS_FILE, &run_table), (AGGREGATE_FILE, &agg_table)] {
        let path = out_dir.join(file);
        fs::write(&path, body).map_err(io_err(&path))?;
    }

    let manifest = out_dir.join(FAILURES_FILE);
    if failures.is_empty() {
        if manifest.exists() {
            fs::remove_file(&manifest).map_err(io_err(&manifest))?;
        }
        return Ok(SweepResults { runs, points });
    }
    let mut text = String::from("# protocol value seed reason\n");
    for (job, reason) in &failures {
        text.push_str(&format!("{} {} {} {}\n", job.protocol, job.value, job.seed, reason));
    }
    fs::write(&manifest, text).map_err(io_err(&manifest))?;
    Err(SweepError::RunsFailed { failed: failures.len(), total: jobs.len(), manifest })
}
