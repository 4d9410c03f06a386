//! Scenario files, sweeps and result tables behind the `grone-sim` binary.

pub mod config;
pub mod sweep;

pub use config::{parse_scenario, parse_scenario_str, ConfigError};
pub use sweep::{
    parse_sweep_arg, run_sweep, RunResult, SweepError, SweepOptions, SweepParameter, SweepResults,
    SweepSpec, DEFAULT_SEEDS,
};
