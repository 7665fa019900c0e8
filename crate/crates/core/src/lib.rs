//! Topology-guided federated learning.
//!
//! Clients summarize their local data as a 48-value persistent-homology
//! descriptor. The server clusters clients on those descriptors, scores trust
//! from descriptor outliers, aggregates topology-weighted within clusters and
//! blends cluster models with a global consensus. The crate also carries the
//! baseline aggregators, synthetic non-IID scenarios, privacy metrics and the
//! experiment harness behind the `topofl` CLI.

pub mod engine;
pub mod error;
pub mod harness;
pub mod model;
pub mod privacy;
pub mod rng;
pub mod scenarios;
pub mod tda;

pub use error::{Result, TopoError};
