//! Exact and heuristic K-contingency computation, the event-driven
//! self-updating list, and LP-format export of the contingency ILP.

pub mod coloring;
pub mod events;
pub mod exact;
pub mod heuristic;
pub mod ilp;

pub use coloring::{color_base, Color, ColoringState};
pub use events::{parse_events_csv, self_updating_list, FailureEvent, TickResult};
pub use exact::{exact_k_contingency, exact_k_over};
pub use heuristic::{augment_contingent, heuristic_k_contingency, HeuristicSolver};
pub use ilp::export_ilp;

use serde::{Deserialize, Serialize};

use crate::cascade::DamageMetric;
use crate::entity::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    #[default]
    Heuristic,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverKind::Exact => write!(f, "exact"),
            SolverKind::Heuristic => write!(f, "heuristic"),
        }
    }
}

/// Result of one K-contingency computation.
///
/// `best_sets` holds every K-subset achieving the maximal damage, each set
/// in canonical entity order and the sets ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyResult {
    pub k: usize,
    pub best_sets: Vec<Vec<EntityId>>,
    pub damage_value: usize,
    pub metric: DamageMetric,
    pub solver: SolverKind,
}

impl ContingencyResult {
    pub(crate) fn from_scored(
        k: usize,
        scored: Vec<(usize, Vec<EntityId>)>,
        metric: DamageMetric,
        solver: SolverKind,
    ) -> Self {
        let damage_value = scored.iter().map(|(d, _)| *d).max().unwrap_or(0);
        let mut best_sets: Vec<Vec<EntityId>> = scored
            .into_iter()
            .filter(|(d, _)| *d == damage_value)
            .map(|(_, mut set)| {
                set.sort();
                set
            })
            .collect();
        best_sets.sort();
        best_sets.dedup();
        ContingencyResult { k, best_sets, damage_value, metric, solver }
    }

    /// Entities appearing in any best set, canonical order.
    pub fn members(&self) -> Vec<EntityId> {
        let mut out: Vec<EntityId> = self.best_sets.iter().flatten().copied().collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn to_json(&self, elapsed_ms: f64) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "damage": self.damage_value,
            "metric": self.metric,
            "solver": self.solver,
            "sets": self.best_sets.iter().map(|s| s.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "elapsed_ms": elapsed_ms,
        })
    }
}
