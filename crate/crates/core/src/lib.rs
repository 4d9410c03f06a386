//! Deterministic, time-stepped simulator for delay-tolerant networks.
//!
//! GRONE routes by one-hop geography: a holder replicates a bundle to at most
//! two neighbors that best extend the coverage ahead of it, and duplicate
//! copies that end up close together are purged. Epidemic, Binary Spray and
//! Wait, FirstContact and Direct Delivery are provided for comparison.

pub mod baselines;
pub mod bundle;
pub mod cli;
pub mod engine;
pub mod geometry;
pub mod grone;
pub mod metrics;
