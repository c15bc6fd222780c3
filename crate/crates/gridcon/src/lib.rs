//! Two-layer smart-grid interdependency engine.
//!
//! Models power and communication entities bound by multi-valued Boolean
//! interdependency relations, simulates cascading failures to steady
//! state, computes exact and heuristic K-contingency lists (including an
//! event-driven self-updating mode), exports the contingency integer
//! program in LP format, and plays three leader-follower hardening games
//! that arrest cascades.

pub mod cascade;
pub mod contingency;
pub mod datasets;
pub mod entity;
pub mod error;
pub mod hardening;
pub mod idr;
pub mod network;
pub mod parser;
pub mod state;

/// Cap the global solver thread pool; call once before any solver runs.
pub fn init_parallelism(threads: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
}
