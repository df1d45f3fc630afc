//! S2 multi-ring data center networks.
//!
//! Switches live on several virtual rings at once. This crate builds such
//! topologies, routes over them greedily by minimum circular distance, and
//! measures path lengths, link loads, forwarding state, bisection bandwidth,
//! flow fairness and failure resiliency.

pub mod analysis;
pub mod bandwidth;
pub mod error;
pub mod geometry;
pub mod rng;
pub mod routing;
pub mod topology;

pub use error::{Error, Result};

/// Library version, echoed in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
