//! Event-driven self-updating contingency list.
//!
//! The pipeline simulates millisecond ticks: each tick advances the
//! internal cascade one synchronous step, applies any external events
//! scheduled at that time (failure, recovery, reduced operation), prunes
//! dead entities from the candidate graph, recomputes the K-contingency
//! list, and folds in the augmentation plus any entities the cascade has
//! failed so far. The recompute wall-clock per tick is reported so the
//! caller can check it against a latency budget.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cascade::{cascade_step, DamageMetric};
use crate::entity::EntityId;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::state::{EvalModel, OperationalState};

use super::heuristic::{augment_contingent, HeuristicSolver};
use super::{exact_k_over, ContingencyResult, SolverKind};

/// One external state change observed by the grid operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureEvent {
    pub time_ms: u64,
    pub entity: EntityId,
    pub new_state: OperationalState,
}

/// Parse `time_ms,entity,new_state` lines. `#` or `%` start comments.
pub fn parse_events_csv(text: &str) -> Result<Vec<FailureEvent>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        if lineno == 0 && line.eq_ignore_ascii_case("time_ms,entity,new_state") {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::BadDocument(format!(
                "event line {}: expected `time_ms,entity,new_state`",
                lineno + 1
            )));
        }
        let time_ms: u64 = parts[0]
            .parse()
            .map_err(|_| Error::BadDocument(format!("event line {}: bad time", lineno + 1)))?;
        let entity: EntityId = parts[1].parse()?;
        let new_state = OperationalState::from_value(
            parts[2]
                .parse::<u8>()
                .map_err(|_| Error::BadDocument(format!("event line {}: bad state", lineno + 1)))?,
        )?;
        out.push(FailureEvent { time_ms, entity, new_state });
    }
    Ok(out)
}

/// The contingency list at one simulated millisecond.
#[derive(Debug, Clone)]
pub struct TickResult {
    pub t_ms: u64,
    pub applied: Vec<FailureEvent>,
    /// Ranked watch list: K-set members, augmented contingent vertices,
    /// and entities failed by the cascade so far (event-injected failures
    /// excluded). Buses rank before communication entities.
    pub list: Vec<EntityId>,
    pub result: ContingencyResult,
    pub recompute_ms: f64,
}

/// Run the self-updating list over an event stream.
///
/// Ticks run from t = 0 to `horizon_ms` (extended to the last event time).
/// Each tick advances the cascade one step, applies that tick's events,
/// and recomputes the list with the requested solver.
pub fn self_updating_list(
    net: &Network,
    events: &[FailureEvent],
    k: usize,
    solver: SolverKind,
    metric: DamageMetric,
    model: EvalModel,
    horizon_ms: u64,
) -> Result<Vec<TickResult>> {
    for e in events {
        if !net.contains(e.entity) {
            return Err(Error::UnknownEventEntity(e.time_ms, e.entity));
        }
        if model == EvalModel::Iim && e.new_state == OperationalState::Reduced {
            return Err(Error::IimNonBinary(e.entity));
        }
    }
    if model == EvalModel::Iim {
        for (e, v) in net.entities().iter().zip(net.states()) {
            if *v == 1 {
                return Err(Error::IimNonBinary(*e));
            }
        }
    }
    let mut ordered: Vec<FailureEvent> = events.to_vec();
    ordered.sort_by_key(|e| e.time_ms);
    let horizon = ordered.last().map(|e| e.time_ms).unwrap_or(0).max(horizon_ms);

    let mut live = net.clone();
    let mut injected: BTreeSet<EntityId> = BTreeSet::new();
    let mut out = Vec::new();
    let mut heuristic = HeuristicSolver::new();

    for t in 0..=horizon {
        if t > 0 {
            let (next, _) = cascade_step(&live, live.states(), model);
            live.set_states_raw(next);
        }
        let applied: Vec<FailureEvent> =
            ordered.iter().filter(|e| e.time_ms == t).copied().collect();
        for ev in &applied {
            live.set_state(ev.entity, ev.new_state)?;
            if ev.new_state == OperationalState::Failed {
                injected.insert(ev.entity);
            } else {
                injected.remove(&ev.entity);
            }
        }

        let started = Instant::now();
        let result = match solver {
            SolverKind::Heuristic => heuristic.solve(&live, k, metric, model)?,
            SolverKind::Exact => {
                let pool = live.eligible_entities();
                exact_k_over(&live, &pool, k, metric, model)?
            }
        };
        let failed_now: BTreeSet<EntityId> = live
            .entities()
            .iter()
            .zip(live.states())
            .filter(|(_, v)| **v == 0)
            .map(|(e, _)| *e)
            .collect();
        let augmented = augment_contingent(&live, &failed_now);

        let mut list: BTreeSet<EntityId> = result.members().into_iter().collect();
        list.extend(augmented);
        list.extend(
            failed_now
                .iter()
                .filter(|e| e.is_contingency_eligible() && !injected.contains(e))
                .copied(),
        );
        let mut list: Vec<EntityId> = list.into_iter().collect();
        list.sort_by(|a, b| b.is_bus().cmp(&a.is_bus()).then(a.cmp(b)));
        let recompute_ms = started.elapsed().as_secs_f64() * 1e3;

        out.push(TickResult { t_ms: t, applied, list, result, recompute_ms });
    }
    Ok(out)
}
