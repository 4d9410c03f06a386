use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::baselines::DEFAULT_SPRAY_TICKETS;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Grone,
    Epidemic,
    SprayAndWait,
    FirstContact,
    DirectDelivery,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::Grone,
        Protocol::Epidemic,
        Protocol::SprayAndWait,
        Protocol::FirstContact,
        Protocol::DirectDelivery,
    ];

    /// The four protocols compared in the result tables.
    pub const COMPARED: [Protocol; 4] = [
        Protocol::Grone,
        Protocol::Epidemic,
        Protocol::SprayAndWait,
        Protocol::FirstContact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Grone => "grone",
            Protocol::Epidemic => "epidemic",
            Protocol::SprayAndWait => "spray-and-wait",
            Protocol::FirstContact => "first-contact",
            Protocol::DirectDelivery => "direct-delivery",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "grone" => Ok(Protocol::Grone),
            "epidemic" => Ok(Protocol::Epidemic),
            "spray-and-wait" | "snw" | "binary-spray-and-wait" => Ok(Protocol::SprayAndWait),
            "first-contact" | "fc" | "firstcontact" => Ok(Protocol::FirstContact),
            "direct-delivery" | "dd" => Ok(Protocol::DirectDelivery),
            other => Err(format!("unknown protocol {other:?}")),
        }
    }
}

/// Everything that determines one run. Sizes in bytes, times in seconds,
/// lengths in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world_width: f64,
    pub world_height: f64,
    pub node_count: u32,
    pub radius: f64,
    pub node_speed: f64,
    pub buffer_size: u64,
    /// Bytes per second on every link.
    pub bandwidth: u64,
    pub message_size: u64,
    pub message_interval: f64,
    pub ttl: f64,
    pub sim_duration: f64,
    pub clock_step: f64,
    pub hello_interval: f64,
    pub spray_tickets: u32,
    pub protocol: Protocol,
    pub seed: u64,
    /// Bounds of the uniform leg-length draw of the random walk.
    pub walk_leg_range: (f64, f64),
}

impl Default for Scenario {
    fn default() -> Self {
        Self::standard()
    }
}

impl Scenario {
    /// The full-size reference settings.
    pub fn standard() -> Self {
        Self {
            world_width: 1000.0,
            world_height: 1000.0,
            node_count: 120,
            radius: 100.0,
            node_speed: 0.5,
            buffer_size: 6_000_000,
            bandwidth: 250_000,
            message_size: 500_000,
            message_interval: 40.0,
            ttl: 20.0 * 60.0,
            sim_duration: 5.0 * 3600.0,
            clock_step: 0.1,
            hello_interval: 1.0,
            spray_tickets: DEFAULT_SPRAY_TICKETS,
            protocol: Protocol::Grone,
            seed: 1,
            walk_leg_range: (50.0, 200.0),
        }
    }

    /// Scaled-down preset: 40 nodes on 500 m × 500 m for one hour, all
    /// other settings as in [`Scenario::standard`].
    pub fn desk() -> Self {
        Self {
            world_width: 500.0,
            world_height: 500.0,
            node_count: 40,
            sim_duration: 3600.0,
            ..Self::standard()
        }
    }

    pub fn with_protocol(mut self, protocol: Protocol) -> Self {
        self.protocol = protocol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Whole clock steps in `seconds` (rounded).
    pub fn ticks(&self, seconds: f64) -> u64 {
        (seconds / self.clock_step).round() as u64
    }

    pub fn total_ticks(&self) -> u64 {
        self.ticks(self.sim_duration)
    }

    /// Bytes a link moves in one clock step.
    pub fn bytes_per_tick(&self) -> u64 {
        (self.bandwidth as f64 * self.clock_step).round() as u64
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let positive = |field: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be positive, got {v}")))
            }
        };
        positive("clock_step", self.clock_step)?;
        let multiple = |field: &'static str, v: f64| {
            let k = v / self.clock_step;
            if (k - k.round()).abs() < 1e-6 {
                Ok(())
            } else {
                Err(invalid(field, format!("{v} s is not a multiple of the clock step")))
            }
        };
        if !(self.sim_duration >= 0.0 && self.sim_duration.is_finite()) {
            return Err(invalid("simulation_time", "must be non-negative"));
        }
        multiple("simulation_time", self.sim_duration)?;
        positive("world_width", self.world_width)?;
        positive("world_height", self.world_height)?;
        if self.node_count < 2 {
            return Err(invalid("number_of_nodes", "need at least two nodes"));
        }
        positive("transmission_range", self.radius)?;
        positive("node_moving_speed", self.node_speed)?;
        positive("message_interval", self.message_interval)?;
        multiple("message_interval", self.message_interval)?;
        positive("message_ttl", self.ttl)?;
        positive("hello_interval", self.hello_interval)?;
        multiple("hello_interval", self.hello_interval)?;
        if self.message_size == 0 {
            return Err(invalid("message_size", "must be positive"));
        }
        if self.buffer_size < self.message_size {
            return Err(invalid(
                "node_buffer_size",
                format!("{} B cannot hold one {} B message", self.buffer_size, self.message_size),
            ));
        }
        if self.bandwidth == 0 || self.bytes_per_tick() == 0 {
            return Err(invalid("transmission_speed", "must move at least one byte per step"));
        }
        if self.spray_tickets == 0 {
            return Err(invalid("spray_tickets", "must be at least 1"));
        }
        let (lo, hi) = self.walk_leg_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(invalid("walk_leg_range", format!("need 0 < min <= max, got ({lo}, {hi})")));
        }
        Ok(())
    }
}
