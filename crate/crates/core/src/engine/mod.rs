//! Scenario description, node state and the tick loop.

pub mod buffer;
pub mod mobility;
pub mod rng;
pub mod scenario;
pub mod world;

pub use buffer::{Buffer, BufferError, InsertOutcome};
pub use mobility::{Bounds, Walker};
pub use scenario::{Protocol, Scenario, ScenarioError};
pub use world::{run, Mobility, NodeState, Transfer, World, WorldOptions};
