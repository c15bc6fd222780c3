//! Leader-follower hardening games over the cascade engine.
//!
//! Three game shapes: (1) the operator hardens its K-contingency set
//! first and an informed attacker best-responds over the residual
//! entities, (2) the attacker leads with a known target region (a storm
//! footprint) and the operator pre-hardens the predicted vulnerable buses
//! by impact factor, (3) an unpredictable attacker fails seeded-random
//! entities and the operator arrests the cascade adaptively.
//!
//! Hardening is state clamping by default (backup-device semantics); the
//! isolate mode additionally strips the entity's edges so it disappears
//! from the graph abstractions.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cascade::{damage, operational_count, run_cascade, settled, CascadeTrace, DamageMetric};
use crate::contingency::{exact_k_over, heuristic_k_contingency, SolverKind};
use crate::entity::EntityId;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::state::EvalModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HardeningMode {
    #[default]
    Clamp,
    Isolate,
}

/// Per-target utilities for defender and attacker under hardened and
/// unhardened outcomes. Dominance must hold row by row: hardening never
/// hurts the defender, an unhardened target never hurts the attacker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffEntry {
    pub defender_hardened: i64,
    pub defender_not_hardened: i64,
    pub attacker_hardened: i64,
    pub attacker_not_hardened: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffTable {
    pub targets: BTreeMap<String, PayoffEntry>,
}

impl PayoffTable {
    pub fn validate(&self) -> Result<()> {
        for (target, p) in &self.targets {
            if p.defender_hardened < p.defender_not_hardened
                || p.attacker_not_hardened < p.attacker_hardened
            {
                return Err(Error::PayoffDominance(target.clone()));
            }
        }
        Ok(())
    }

    /// The two-target worked example: T1 = (2, 0, -1, 1), T2 = (0, -2, -1, 1).
    pub fn two_target_example() -> Self {
        let mut targets = BTreeMap::new();
        targets.insert(
            "T1".to_string(),
            PayoffEntry {
                defender_hardened: 2,
                defender_not_hardened: 0,
                attacker_hardened: -1,
                attacker_not_hardened: 1,
            },
        );
        targets.insert(
            "T2".to_string(),
            PayoffEntry {
                defender_hardened: 0,
                defender_not_hardened: -2,
                attacker_hardened: -1,
                attacker_not_hardened: 1,
            },
        );
        PayoffTable { targets }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameScenario {
    pub game_type: u8,
    /// Defender budget: entities the operator can harden.
    pub k: usize,
    /// Attacker budget for game type 1.
    #[serde(default)]
    pub m: Option<usize>,
    /// Attacker budget for game type 3.
    #[serde(default)]
    pub l: Option<usize>,
    /// Target region for game type 2.
    #[serde(default)]
    pub region: Vec<EntityId>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default)]
    pub metric: DamageMetric,
    #[serde(default)]
    pub hardening_mode: HardeningMode,
}

impl GameScenario {
    pub fn validate(&self) -> Result<()> {
        match self.game_type {
            1 => {
                if self.m.unwrap_or(0) == 0 {
                    return Err(Error::BadScenario("type 1 needs an attacker budget m >= 1".into()));
                }
            }
            2 => {
                if self.region.is_empty() {
                    return Err(Error::BadScenario("type 2 needs a target region".into()));
                }
                if self.k >= self.region.len() {
                    return Err(Error::BadScenario(format!(
                        "type 2 needs k < |region| ({} >= {})",
                        self.k,
                        self.region.len()
                    )));
                }
            }
            3 => {
                if self.l.unwrap_or(0) == 0 {
                    return Err(Error::BadScenario("type 3 needs an attacker budget l >= 1".into()));
                }
            }
            other => return Err(Error::BadScenario(format!("unknown game type {other}"))),
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GameOutcome {
    pub game_type: u8,
    pub hardened: Vec<EntityId>,
    pub attacked: Vec<EntityId>,
    pub predicted_vulnerable: Vec<EntityId>,
    pub damage_hardened: usize,
    pub damage_unhardened: usize,
    pub operational_before: usize,
    pub operational_after_hardened: usize,
    pub operational_after_unhardened: usize,
    pub defender_payoff: i64,
    pub attacker_payoff: i64,
    pub trace_hardened: CascadeTrace,
    pub seed: Option<u64>,
}

impl GameOutcome {
    pub fn to_json(&self, scenario: &GameScenario) -> serde_json::Value {
        serde_json::json!({
            "game_type": self.game_type,
            "k": scenario.k,
            "solver": scenario.solver,
            "metric": scenario.metric,
            "hardening_mode": scenario.hardening_mode,
            "seed": self.seed,
            "hardened": tokens(&self.hardened),
            "attacked": tokens(&self.attacked),
            "predicted_vulnerable": tokens(&self.predicted_vulnerable),
            "damage_hardened": self.damage_hardened,
            "damage_unhardened": self.damage_unhardened,
            "operational_before": self.operational_before,
            "operational_after_hardened": self.operational_after_hardened,
            "operational_after_unhardened": self.operational_after_unhardened,
            "defender_payoff": self.defender_payoff,
            "attacker_payoff": self.attacker_payoff,
        })
    }
}

fn tokens(list: &[EntityId]) -> Vec<String> {
    list.iter().map(|e| e.to_string()).collect()
}

/// Count of other entities whose steady-state value decreases when the
/// given entity fails from the current (settled) state.
pub fn impact_factor(net: &Network, entity: EntityId, model: EvalModel) -> Result<usize> {
    if net.is_hardened(entity) {
        return Err(Error::HardenedFailure(entity));
    }
    let base = settled(net, model)?;
    if !base.state_of(entity)?.is_operational() {
        return Err(Error::NotOperational(entity));
    }
    let failures: BTreeSet<EntityId> = [entity].into();
    let trace = run_cascade(&base, &failures, &BTreeSet::new(), model)?;
    let me = base.index_of(entity)?;
    Ok(trace.dropped_indices().into_iter().filter(|i| *i != me).count())
}

/// The attacker's best response: an exact K-contingency search restricted
/// to the non-hardened eligible entities. Returns the canonical argmax set.
pub fn best_response_attack(
    net: &Network,
    hardened: &BTreeSet<EntityId>,
    budget: usize,
    metric: DamageMetric,
    model: EvalModel,
) -> Result<Vec<EntityId>> {
    let mut armed = net.clone();
    for h in hardened {
        armed.harden(*h)?;
    }
    let pool = armed.eligible_entities();
    if budget > pool.len() {
        return Err(Error::KExceedsEligible { k: budget, eligible: pool.len() });
    }
    let result = exact_k_over(&armed, &pool, budget, metric, model)?;
    Ok(result.best_sets.into_iter().next().unwrap_or_default())
}

fn solve_contingency(
    net: &Network,
    k: usize,
    solver: SolverKind,
    metric: DamageMetric,
    model: EvalModel,
) -> Result<crate::contingency::ContingencyResult> {
    match solver {
        SolverKind::Exact => {
            let pool = settled(net, model)?.eligible_entities();
            exact_k_over(net, &pool, k.min(pool.len()), metric, model)
        }
        SolverKind::Heuristic => heuristic_k_contingency(net, k, metric, model),
    }
}

fn harden_one(net: &mut Network, entity: EntityId, mode: HardeningMode) -> Result<()> {
    match mode {
        HardeningMode::Clamp => net.harden(entity),
        HardeningMode::Isolate => net.harden_isolated(entity),
    }
}

/// Adaptive hardening loop: while the predicted cascade still causes
/// state drops and budget remains, compute the K-contingency list on the
/// post-failure network, rank it by impact factor, and harden the top
/// entity at its current state.
pub fn adaptive_harden(
    net: &Network,
    active_failures: &BTreeSet<EntityId>,
    budget: usize,
    solver: SolverKind,
    metric: DamageMetric,
    model: EvalModel,
    mode: HardeningMode,
) -> Result<(BTreeSet<EntityId>, CascadeTrace)> {
    let mut armed = net.clone();
    for f in active_failures {
        if armed.is_hardened(*f) {
            return Err(Error::HardenedFailure(*f));
        }
        armed.set_state(*f, crate::state::OperationalState::Failed)?;
    }
    let mut chosen: BTreeSet<EntityId> = BTreeSet::new();
    let mut remaining = budget;
    loop {
        let trace = run_cascade(&armed, &BTreeSet::new(), &BTreeSet::new(), model)?;
        if remaining == 0 || trace.dropped_indices().is_empty() {
            return Ok((chosen, trace));
        }
        let k_now = budget.max(1);
        let listed = match solve_contingency(&armed, k_now, solver, metric, model) {
            Ok(result) => result.members(),
            Err(_) => Vec::new(),
        };
        let mut ranked: Vec<(usize, EntityId)> = Vec::new();
        for e in listed {
            if chosen.contains(&e) || armed.is_hardened(e) {
                continue;
            }
            ranked.push((impact_factor(&armed, e, model)?, e));
        }
        if ranked.is_empty() {
            return Ok((chosen, trace));
        }
        ranked.sort_by(|(ia, ea), (ib, eb)| ib.cmp(ia).then(ea.cmp(eb)));
        let (_, top) = ranked[0];
        harden_one(&mut armed, top, mode)?;
        chosen.insert(top);
        remaining -= 1;
    }
}

/// Play one scenario and report both the hardened outcome and the
/// same-attack counterfactual without hardening.
pub fn run_game(net: &Network, scenario: &GameScenario, model: EvalModel) -> Result<GameOutcome> {
    scenario.validate()?;
    let base = settled(net, model)?;
    let operational_before = operational_count(base.states());
    let mode = scenario.hardening_mode;

    let (hardened, attacked, predicted, trace_hardened, seed) = match scenario.game_type {
        1 => {
            let defend =
                solve_contingency(&base, scenario.k, scenario.solver, scenario.metric, model)?;
            let harden_set: Vec<EntityId> =
                defend.best_sets.into_iter().next().unwrap_or_default();
            let mut armed = base.clone();
            for h in &harden_set {
                harden_one(&mut armed, *h, mode)?;
            }
            let attacked = best_response_attack(
                &base,
                &harden_set.iter().copied().collect(),
                scenario.m.unwrap(),
                scenario.metric,
                model,
            )?;
            // The attack lands; the operator then arrests the cascade with
            // the same budget.
            let (arrest, trace) = adaptive_harden(
                &armed,
                &attacked.iter().copied().collect(),
                scenario.k,
                scenario.solver,
                scenario.metric,
                model,
                mode,
            )?;
            let mut all_hardened = harden_set;
            all_hardened.extend(arrest);
            all_hardened.sort();
            (all_hardened, attacked, Vec::new(), trace, None)
        }
        2 => {
            for e in &scenario.region {
                if !base.contains(*e) {
                    return Err(Error::UnknownEntity(*e));
                }
            }
            let region: BTreeSet<EntityId> = scenario.region.iter().copied().collect();
            let probe = run_cascade(&base, &region, &BTreeSet::new(), model)?;
            let predicted: Vec<EntityId> = probe
                .dropped_indices()
                .into_iter()
                .map(|i| base.entity_at(i))
                .filter(|e| e.is_bus())
                .collect();
            let mut ranked: Vec<(usize, EntityId)> = predicted
                .iter()
                .map(|e| Ok((impact_factor(&base, *e, model)?, *e)))
                .collect::<Result<_>>()?;
            ranked.sort_by(|(ia, ea), (ib, eb)| ib.cmp(ia).then(ea.cmp(eb)));
            let harden_set: Vec<EntityId> =
                ranked.iter().take(scenario.k).map(|(_, e)| *e).collect();
            let mut armed = base.clone();
            for h in &harden_set {
                harden_one(&mut armed, *h, mode)?;
            }
            let attack: BTreeSet<EntityId> =
                region.iter().filter(|e| !harden_set.contains(e)).copied().collect();
            let trace = run_cascade(&armed, &attack, &BTreeSet::new(), model)?;
            (harden_set, attack.into_iter().collect(), predicted, trace, None)
        }
        3 => {
            let seed = scenario.seed.unwrap_or(0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pool = base.eligible_entities();
            pool.shuffle(&mut rng);
            let l = scenario.l.unwrap();
            if l > pool.len() {
                return Err(Error::KExceedsEligible { k: l, eligible: pool.len() });
            }
            let mut attacked: Vec<EntityId> = pool.into_iter().take(l).collect();
            attacked.sort();
            let (arrest, trace) = adaptive_harden(
                &base,
                &attacked.iter().copied().collect(),
                scenario.k,
                scenario.solver,
                scenario.metric,
                model,
                mode,
            )?;
            (arrest.into_iter().collect(), attacked, Vec::new(), trace, Some(seed))
        }
        _ => unreachable!("validated above"),
    };

    // Counterfactual: the identical attack against the unhardened grid.
    // For the region game the storm also hits what hardening would have
    // protected, so the full region fails.
    let counter_attack: BTreeSet<EntityId> = if scenario.game_type == 2 {
        scenario.region.iter().copied().collect()
    } else {
        attacked.iter().copied().collect()
    };
    let trace_unhardened = run_cascade(&base, &counter_attack, &BTreeSet::new(), model)?;

    let damage_hardened = damage(&trace_hardened, scenario.metric);
    let damage_unhardened = damage(&trace_unhardened, scenario.metric);
    let defender_payoff = damage_unhardened as i64 - damage_hardened as i64;

    Ok(GameOutcome {
        game_type: scenario.game_type,
        operational_after_hardened: operational_count(trace_hardened.final_states()),
        operational_after_unhardened: operational_count(trace_unhardened.final_states()),
        hardened,
        attacked,
        predicted_vulnerable: predicted,
        damage_hardened,
        damage_unhardened,
        operational_before,
        defender_payoff,
        attacker_payoff: -defender_payoff,
        trace_hardened,
        seed,
    })
}
