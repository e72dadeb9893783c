//! Fully dynamic transitive reduction.
//!
//! Two families of engines maintain the set of edges belonging to a
//! transitive reduction while the graph undergoes centered insertions (a
//! batch of edges all incident to one vertex) and arbitrary batch deletions:
//!
//! * [`DagEngine`] and [`GeneralEngine`] keep per-vertex snapshots of the
//!   graph together with per-edge counters, and
//! * [`AlgebraicEngine`] maintains the inverse of a randomized symbolic
//!   adjacency matrix over a prime field.
//!
//! [`oracle`] holds brute-force ground truth for all of them.

pub mod algebraic;
pub mod decreach;
pub mod engine;
mod error;
pub mod graph;
pub mod oracle;
pub mod scc;
pub mod stream;
pub mod tr_dag;
pub mod tr_general;

pub use algebraic::AlgebraicEngine;
pub use engine::{Engine, EngineKind};
pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, Mode, TimestampedGraph, Timestamp, Update, Vertex};
pub use tr_dag::DagEngine;
pub use tr_general::GeneralEngine;
