//! `key = value` scenario files.
//!
//! One setting per line, `#` starts a comment. Keys are the snake_case
//! setting names; any key left out keeps its [`Scenario::standard`] value. A
//! bare number is read in the key's customary unit (minutes for the TTL,
//! hours for the simulation time, KB for message size, MB for buffers), or
//! an explicit suffix may be given: `message_ttl = 1200s`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engine::{Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {key} given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: {key}: {reason}")]
    Value { line: usize, key: String, reason: String },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Physical dimension of a setting, with its unit table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Count,
    Length,
    Speed,
    Size,
    Rate,
    Time,
}

impl Dimension {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Count => &[],
            Dimension::Length => &[("m", 1.0), ("km", 1000.0)],
            Dimension::Speed => &[("m/s", 1.0), ("mps", 1.0), ("km/h", 1.0 / 3.6)],
            Dimension::Size => &[("b", 1.0), ("kb", 1e3), ("mb", 1e6), ("gb", 1e9)],
            Dimension::Rate => &[("bps", 1.0), ("kbps", 1e3), ("mbps", 1e6)],
            Dimension::Time => &[("ms", 1e-3), ("s", 1.0), ("min", 60.0), ("h", 3600.0)],
        }
    }
}

/// Parse `text` as a quantity of `dim`; a bare number is scaled by
/// `default_scale`. The result is in base units (m, m/s, B, B/s, s).
pub fn parse_quantity(text: &str, dim: Dimension, default_scale: f64) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_ascii_alphabetic() || c == '/')
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let value: f64 = num.trim().parse().map_err(|_| format!("not a number: {text:?}"))?;
    if !value.is_finite() {
        return Err(format!("not a finite number: {text:?}"));
    }
    let unit = unit.trim().to_ascii_lowercase();
    if unit.is_empty() {
        return Ok(value * default_scale);
    }
    dim.units()
        .iter()
        .find(|(name, _)| *name == unit)
        .map(|(_, scale)| value * scale)
        .ok_or_else(|| format!("unknown unit {unit:?}"))
}

fn parse_count(text: &str) -> Result<u64, String> {
    text.trim().parse().map_err(|_| format!("expected a non-negative integer, got {text:?}"))
}

fn to_bytes(v: f64) -> Result<u64, String> {
    if v < 0.0 {
        return Err(format!("must be non-negative, got {v}"));
    }
    Ok(v.round() as u64)
}

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "world_size",
    "world_width",
    "world_height",
    "number_of_nodes",
    "transmission_range",
    "node_moving_speed",
    "movement_model",
    "node_buffer_size",
    "transmission_speed",
    "message_size",
    "message_interval",
    "message_ttl",
    "simulation_time",
    "clock_step",
    "hello_interval",
    "tickets_in_binary_sw",
    "spray_tickets",
    "protocol",
    "seed",
    "walk_leg_min",
    "walk_leg_max",
];

/// Apply one `key = value` setting to `s`.
pub fn apply_setting(s: &mut Scenario, key: &str, value: &str) -> Result<(), String> {
    use Dimension::*;
    let q = |dim, scale| parse_quantity(value, dim, scale);
    match key {
        "world_size" => {
            let side = q(Length, 1.0)?;
            s.world_width = side;
            s.world_height = side;
        }
        "world_width" => s.world_width = q(Length, 1.0)?,
        "world_height" => s.world_height = q(Length, 1.0)?,
        "number_of_nodes" => {
            s.node_count = u32::try_from(parse_count(value)?).map_err(|e| e.to_string())?
        }
        "transmission_range" => s.radius = q(Length, 1.0)?,
        "node_moving_speed" => s.node_speed = q(Speed, 1.0)?,
        "movement_model" => {
            let m = value.trim().to_ascii_lowercase().replace(['-', ' '], "_");
            if m != "random_walk" {
                return Err(format!("only random_walk is supported, got {value:?}"));
            }
        }
        "node_buffer_size" => s.buffer_size = to_bytes(q(Size, 1e6)?)?,
        "transmission_speed" => s.bandwidth = to_bytes(q(Rate, 1e3)?)?,
        "message_size" => s.message_size = to_bytes(q(Size, 1e3)?)?,
        "message_interval" => s.message_interval = q(Time, 1.0)?,
        "message_ttl" => s.ttl = q(Time, 60.0)?,
        "simulation_time" => s.sim_duration = q(Time, 3600.0)?,
        "clock_step" => s.clock_step = q(Time, 1.0)?,
        "hello_interval" => s.hello_interval = q(Time, 1.0)?,
        "tickets_in_binary_sw" | "spray_tickets" => {
            s.spray_tickets = u32::try_from(parse_count(value)?).map_err(|e| e.to_string())?
        }
        "protocol" => s.protocol = value.parse()?,
        "seed" => s.seed = parse_count(value)?,
        "walk_leg_min" => s.walk_leg_range.0 = q(Length, 1.0)?,
        "walk_leg_max" => s.walk_leg_range.1 = q(Length, 1.0)?,
        _ => return Err(format!("unknown key {key:?}")),
    }
    Ok(())
}

/// Parse scenario text on top of `base`, then validate the result.
pub fn parse_scenario_str(text: &str, base: Scenario) -> Result<Scenario, ConfigError> {
    let mut s = base;
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: raw.to_string() });
        };
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { line, key });
        }
        if !seen.insert(key.clone()) {
            return Err(ConfigError::Duplicate { line, key });
        }
        apply_setting(&mut s, &key, value)
            .map_err(|reason| ConfigError::Value { line, key: key.clone(), reason })?;
    }
    s.validate()?;
    Ok(s)
}

/// Read a scenario file; omitted keys take the full-size defaults.
pub fn parse_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_scenario_str(&text, Scenario::standard())
}
