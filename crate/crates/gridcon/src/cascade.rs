//! Synchronous time-stepped failure propagation.
//!
//! One step evaluates every IDR against the previous step's state table
//! (Jacobi update); an entity's next state is the minimum of its current
//! state and its IDR value, so states never increase during a cascade.
//! State 0 is absorbing: a failed entity is observationally removed from
//! the network, because every leaf that names it reads 0. Channel entities
//! carry no IDR and fail exactly when both endpoints have failed. Hardened
//! entities are clamped at their current state.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::entity::EntityId;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::state::EvalModel;

/// How end-of-cascade damage is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DamageMetric {
    /// Number of entities that reached state 0.
    FailedCount,
    /// Total state value lost across all entities.
    #[default]
    StateLoss,
}

impl std::fmt::Display for DamageMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DamageMetric::FailedCount => write!(f, "failed-count"),
            DamageMetric::StateLoss => write!(f, "state-loss"),
        }
    }
}

/// One step of the trace: the full state table after the step and the set
/// of entities whose state changed at this step.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: usize,
    pub states: Vec<u8>,
    pub changed: Vec<u32>,
}

/// Complete record of a cascade from initial failure to steady state.
#[derive(Debug, Clone)]
pub struct CascadeTrace {
    /// State table immediately before the initial failures were applied.
    pub pre_failure: Vec<u8>,
    /// Snapshots from t = 0 (failures applied) to the fixpoint.
    pub snapshots: Vec<Snapshot>,
    pub initial_failures: BTreeSet<EntityId>,
    pub hardened: BTreeSet<EntityId>,
}

impl CascadeTrace {
    pub fn final_states(&self) -> &[u8] {
        &self.snapshots.last().expect("trace has at least the injection snapshot").states
    }

    /// Number of propagation steps after the initial injection.
    pub fn steps(&self) -> usize {
        self.snapshots.len() - 1
    }

    /// Entities whose steady-state value is below their pre-failure value.
    pub fn dropped_indices(&self) -> Vec<usize> {
        let fin = self.final_states();
        (0..fin.len()).filter(|&i| fin[i] < self.pre_failure[i]).collect()
    }

    pub fn to_json(&self, net: &Network) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .snapshots
            .iter()
            .map(|snap| {
                let states: BTreeMap<String, u8> = net
                    .entities()
                    .iter()
                    .zip(&snap.states)
                    .map(|(e, v)| (e.to_string(), *v))
                    .collect();
                let changed: Vec<String> =
                    snap.changed.iter().map(|i| net.entity_at(*i as usize).to_string()).collect();
                serde_json::json!({ "t": snap.t, "states": states, "changed": changed })
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    /// Flat `t,entity,state` rows covering every entity at every step.
    pub fn to_csv(&self, net: &Network) -> String {
        let mut out = String::from("t,entity,state\n");
        for snap in &self.snapshots {
            for (e, v) in net.entities().iter().zip(&snap.states) {
                out.push_str(&format!("{},{},{}\n", snap.t, e, v));
            }
        }
        out
    }
}

/// Evaluate one synchronous step. Returns the next state table and the
/// dense indices that changed. Total on valid networks.
pub fn cascade_step(net: &Network, states: &[u8], model: EvalModel) -> (Vec<u8>, Vec<u32>) {
    cascade_step_masked(net, states, net.hardened_mask(), model)
}

fn cascade_step_masked(
    net: &Network,
    states: &[u8],
    hardened: &[bool],
    model: EvalModel,
) -> (Vec<u8>, Vec<u32>) {
    let mut next = states.to_vec();
    let mut changed = Vec::new();
    for i in 0..states.len() {
        let cur = states[i];
        if cur == 0 || hardened[i] {
            continue;
        }
        let candidate = if let Some(expr) = net.compiled(i) {
            let v = match model {
                EvalModel::Miim => expr.eval_miim(states),
                EvalModel::Iim => expr.eval_iim(states),
            };
            cur.min(v)
        } else if let Some((a, b)) = net.link(i) {
            if states[a as usize] == 0 && states[b as usize] == 0 {
                0
            } else {
                cur
            }
        } else {
            cur
        };
        if candidate != cur {
            next[i] = candidate;
            changed.push(i as u32);
        }
    }
    (next, changed)
}

/// Run a cascade to its steady state.
///
/// `extra_hardened` is clamped in addition to the network's own hardened
/// set. Initial failures must not name hardened entities.
pub fn run_cascade(
    net: &Network,
    initial_failures: &BTreeSet<EntityId>,
    extra_hardened: &BTreeSet<EntityId>,
    model: EvalModel,
) -> Result<CascadeTrace> {
    let mut hardened_mask = net.hardened_mask().to_vec();
    let mut hardened_all = net.hardened().clone();
    for h in extra_hardened {
        hardened_mask[net.index_of(*h)?] = true;
        hardened_all.insert(*h);
    }

    let pre_failure = net.states().to_vec();
    let mut current = pre_failure.clone();
    let mut injected = Vec::new();
    for f in initial_failures {
        if hardened_all.contains(f) {
            return Err(Error::HardenedFailure(*f));
        }
        let i = net.index_of(*f)?;
        if current[i] != 0 {
            current[i] = 0;
            injected.push(i as u32);
        }
    }

    if model == EvalModel::Iim {
        for (i, v) in current.iter().enumerate() {
            if *v == 1 {
                return Err(Error::IimNonBinary(net.entity_at(i)));
            }
        }
    }

    let mut snapshots = vec![Snapshot { t: 0, states: current.clone(), changed: injected }];
    // Monotone three-valued states bound total decrements by 2|E|.
    let step_cap = 2 * net.len() + 2;
    loop {
        let (next, changed) = cascade_step_masked(net, &current, &hardened_mask, model);
        if changed.is_empty() {
            break;
        }
        current = next;
        snapshots.push(Snapshot { t: snapshots.len(), states: current.clone(), changed });
        if snapshots.len() > step_cap {
            unreachable!("cascade failed to reach a fixpoint within the decrement bound");
        }
    }

    Ok(CascadeTrace {
        pre_failure,
        snapshots,
        initial_failures: initial_failures.clone(),
        hardened: hardened_all,
    })
}

/// Damage of a completed trace relative to its pre-failure snapshot.
pub fn damage(trace: &CascadeTrace, metric: DamageMetric) -> usize {
    let fin = trace.final_states();
    match metric {
        DamageMetric::FailedCount => {
            (0..fin.len()).filter(|&i| trace.pre_failure[i] > 0 && fin[i] == 0).count()
        }
        DamageMetric::StateLoss => (0..fin.len())
            .map(|i| trace.pre_failure[i].saturating_sub(fin[i]) as usize)
            .sum(),
    }
}

/// A copy of the network with its state table advanced to the fixpoint of
/// an empty-failure cascade. Contingency solvers settle their input so
/// candidate damage is measured from a steady baseline.
pub fn settled(net: &Network, model: EvalModel) -> Result<Network> {
    let trace = run_cascade(net, &BTreeSet::new(), &BTreeSet::new(), model)?;
    let mut out = net.clone();
    out.set_states_raw(trace.final_states().to_vec());
    Ok(out)
}

/// Count of entities at a non-zero state.
pub fn operational_count(states: &[u8]) -> usize {
    states.iter().filter(|v| **v > 0).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Network, NetworkDocument, RawEdges};

    fn net_from(entities: &[&str], idrs: &[&str], states: &[(&str, u8)]) -> Network {
        let doc = NetworkDocument {
            entities: entities.iter().map(|s| s.to_string()).collect(),
            idrs: idrs.iter().map(|s| s.to_string()).collect(),
            edges: RawEdges::default(),
            annotations: Default::default(),
            initial_states: states.iter().map(|(t, v)| (t.to_string(), *v)).collect(),
            hardened: vec![],
        };
        Network::from_document(&doc).unwrap()
    }

    fn fail(tokens: &[&str]) -> BTreeSet<EntityId> {
        tokens.iter().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn all_full_is_a_fixpoint() {
        let net = net_from(&["P1", "P2", "P3"], &["P2 <- P1 & P3"], &[]);
        let (_, changed) = cascade_step(&net, net.states(), EvalModel::Miim);
        assert!(changed.is_empty());
    }

    #[test]
    fn empty_failure_set_gives_zero_damage() {
        let net = net_from(&["P1", "P2"], &["P2 <- P1"], &[]);
        let trace = run_cascade(&net, &BTreeSet::new(), &BTreeSet::new(), EvalModel::Miim).unwrap();
        assert_eq!(trace.snapshots.len(), 1);
        assert_eq!(damage(&trace, DamageMetric::FailedCount), 0);
        assert_eq!(damage(&trace, DamageMetric::StateLoss), 0);
    }

    #[test]
    fn failure_propagates_and_absorbs() {
        let net = net_from(&["P1", "P2", "P3"], &["P2 <- P1", "P3 <- P2"], &[]);
        let trace = run_cascade(&net, &fail(&["P1"]), &BTreeSet::new(), EvalModel::Miim).unwrap();
        assert_eq!(trace.final_states(), &[0, 0, 0]);
        assert_eq!(trace.steps(), 2);
        assert_eq!(damage(&trace, DamageMetric::FailedCount), 3);
        assert_eq!(damage(&trace, DamageMetric::StateLoss), 6);
    }

    #[test]
    fn hardened_entities_are_clamped() {
        let net = net_from(&["P1", "P2", "P3"], &["P2 <- P1", "P3 <- P2"], &[]);
        let hardened = fail(&["P2"]);
        let trace = run_cascade(&net, &fail(&["P1"]), &hardened, EvalModel::Miim).unwrap();
        assert_eq!(trace.final_states(), &[0, 2, 2]);
    }

    #[test]
    fn failing_a_hardened_entity_is_an_error() {
        let net = net_from(&["P1", "P2"], &[], &[]);
        let hardened = fail(&["P1"]);
        assert!(matches!(
            run_cascade(&net, &fail(&["P1"]), &hardened, EvalModel::Miim),
            Err(Error::HardenedFailure(_))
        ));
    }

    #[test]
    fn link_fails_only_when_both_ends_fail() {
        let net = net_from(&["P1", "P2", "PL1_2"], &[], &[]);
        let trace = run_cascade(&net, &fail(&["P1"]), &BTreeSet::new(), EvalModel::Miim).unwrap();
        let line_idx = net.index_of("PL1_2".parse().unwrap()).unwrap();
        assert_eq!(trace.final_states()[line_idx], 2);
        let trace = run_cascade(&net, &fail(&["P1", "P2"]), &BTreeSet::new(), EvalModel::Miim).unwrap();
        assert_eq!(trace.final_states()[line_idx], 0);
    }

    #[test]
    fn iim_rejects_reduced_initial_state() {
        let net = net_from(&["P1", "P2"], &["P2 <- P1"], &[("P1", 1)]);
        assert!(matches!(
            run_cascade(&net, &BTreeSet::new(), &BTreeSet::new(), EvalModel::Iim),
            Err(Error::IimNonBinary(_))
        ));
    }

    #[test]
    fn battery_pattern_degrades_then_settles() {
        // server <- (L1_1 & P1) # (L5_1 & PBATT1)
        let net = net_from(
            &["P1", "PBATT1", "L1_1", "L5_1", "C1_1_1_1"],
            &["C1_1_1_1 <- (L1_1 & P1) # (L5_1 & PBATT1)"],
            &[],
        );
        let trace = run_cascade(&net, &fail(&["P1"]), &BTreeSet::new(), EvalModel::Miim).unwrap();
        let srv = net.index_of("C1_1_1_1".parse().unwrap()).unwrap();
        assert_eq!(trace.final_states()[srv], 1);
        // Same shape under IIM fails outright.
        let trace = run_cascade(&net, &fail(&["P1"]), &BTreeSet::new(), EvalModel::Iim).unwrap();
        assert_eq!(trace.final_states()[srv], 0);
    }
}
