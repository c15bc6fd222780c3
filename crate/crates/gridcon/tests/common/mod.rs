//! Shared test support: a seeded random-network generator and an
//! independently coded brute-force contingency oracle.
//!
//! The oracle deliberately re-implements evaluation, propagation, subset
//! enumeration, and damage scoring with different machinery (tree walks
//! over entity maps, bitmask subset loops) so it shares no code path with
//! the engine it checks.

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gridcon::cascade::DamageMetric;
use gridcon::entity::EntityId;
use gridcon::idr::IdrExpression;
use gridcon::network::{Annotations, EdgeSets, Network, NetworkDocument, RawEdges, Substation};
use gridcon::state::EvalModel;

/// Random small network: a connected bus graph, optional line entities,
/// a few communication terminals, and random IDR trees.
pub fn random_network(seed: u64, max_entities: usize, max_idrs: usize) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_bus = rng.gen_range(3..=6usize);

    let mut entities: Vec<String> = (1..=n_bus).map(|i| format!("P{i}")).collect();
    let mut pp: Vec<(String, String)> = Vec::new();
    for b in 2..=n_bus {
        let other = rng.gen_range(1..b);
        pp.push((format!("P{other}"), format!("P{b}")));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let a = rng.gen_range(1..=n_bus);
        let b = rng.gen_range(1..=n_bus);
        if a != b {
            pp.push((format!("P{}", a.min(b)), format!("P{}", a.max(b))));
        }
    }
    // Line entities for a random subset of the edges.
    let mut seen_pairs: BTreeSet<(String, String)> = BTreeSet::new();
    for (a, b) in &pp {
        if seen_pairs.insert((a.clone(), b.clone())) && rng.gen_bool(0.6) {
            let line = format!("PL{}_{}", &a[1..], &b[1..]);
            if entities.len() < max_entities {
                entities.push(line);
            }
        }
    }
    let n_comm = rng.gen_range(0..=3usize);
    let mut cc: Vec<(String, String)> = Vec::new();
    let mut pc: Vec<(String, String)> = Vec::new();
    for c in 1..=n_comm {
        if entities.len() >= max_entities {
            break;
        }
        entities.push(format!("C1_1_{c}_{c}"));
        let bus = rng.gen_range(1..=n_bus);
        pc.push((format!("P{bus}"), format!("C1_1_{c}_{c}")));
        if c > 1 {
            cc.push((format!("C1_1_1_1"), format!("C1_1_{c}_{c}")));
        }
    }
    if entities.len() < max_entities && rng.gen_bool(0.4) {
        entities.push("PBATT1".into());
    }

    // Random IDR trees over the declared entities.
    let mut idrs: Vec<String> = Vec::new();
    let mut targets: Vec<String> =
        entities.iter().filter(|t| !t.starts_with("PL") && !t.starts_with("PBATT")).cloned().collect();
    targets.shuffle(&mut rng);
    for target in targets.into_iter().skip(1) {
        if idrs.len() >= max_idrs || rng.gen_bool(0.25) {
            continue;
        }
        let leaves: Vec<String> =
            entities.iter().filter(|t| **t != target).cloned().collect();
        if leaves.len() < 2 {
            continue;
        }
        let expr = random_expr(&mut rng, &leaves, 2);
        idrs.push(format!("{target} <- {expr}"));
    }

    let doc = NetworkDocument {
        entities,
        idrs,
        edges: RawEdges { pp, cc, pc },
        annotations: Annotations::default(),
        initial_states: BTreeMap::new(),
        hardened: vec![],
    };
    Network::from_document(&doc).expect("generated network is well formed")
}

fn random_expr(rng: &mut ChaCha8Rng, leaves: &[String], depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.4) {
        return leaves[rng.gen_range(0..leaves.len())].clone();
    }
    let op = ["&", "|", "#"][rng.gen_range(0..3)];
    let arity = rng.gen_range(2..=3usize);
    let children: Vec<String> =
        (0..arity).map(|_| random_expr(rng, leaves, depth - 1)).collect();
    format!("({})", children.join(&format!(" {op} ")))
}

/// A network with generator/PMU annotations and substations, for game and
/// heuristic trials that need the coloring inputs.
pub fn random_annotated_network(seed: u64) -> Network {
    let net = random_network(seed, 15, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    let buses: Vec<EntityId> = net.buses().collect();
    let mut doc = net.to_document();
    let mut annotations = Annotations::default();
    for b in &buses {
        if rng.gen_bool(0.5) {
            annotations.generators.insert(*b);
        }
        if rng.gen_bool(0.4) {
            annotations.pmu_buses.insert(*b);
        }
        let id = annotations.substations.len() as u32 + 1;
        annotations.substations.insert(
            id,
            Substation { buses: [*b].into(), comm: BTreeSet::new(), zone: 1 },
        );
    }
    doc.annotations = annotations;
    Network::from_document(&doc).expect("annotated network is well formed")
}

// ---------------------------------------------------------------------
// Independent oracle
// ---------------------------------------------------------------------

/// Straightforward tree-walk evaluation over an entity-state map.
fn oracle_eval(expr: &IdrExpression, states: &BTreeMap<EntityId, u8>, model: EvalModel) -> u8 {
    match expr {
        IdrExpression::Leaf(e) => states[e],
        IdrExpression::MinAnd(cs) => {
            cs.iter().map(|c| oracle_eval(c, states, model)).min().unwrap()
        }
        IdrExpression::MaxOr(cs) => {
            cs.iter().map(|c| oracle_eval(c, states, model)).max().unwrap()
        }
        IdrExpression::NewXor(cs) => {
            let vals: Vec<u8> = cs.iter().map(|c| oracle_eval(c, states, model)).collect();
            match model {
                EvalModel::Iim => *vals.iter().min().unwrap(),
                EvalModel::Miim => {
                    if vals.iter().all(|v| *v == vals[0]) {
                        vals[0]
                    } else {
                        1
                    }
                }
            }
        }
    }
}

/// Loop-until-stable propagation over entity maps, with the both-ends
/// channel rule re-derived from entity kinds.
pub fn oracle_cascade(
    net: &Network,
    failures: &BTreeSet<EntityId>,
    hardened: &BTreeSet<EntityId>,
    model: EvalModel,
) -> BTreeMap<EntityId, u8> {
    let mut states: BTreeMap<EntityId, u8> =
        net.entities().iter().zip(net.states()).map(|(e, v)| (*e, *v)).collect();
    for f in failures {
        states.insert(*f, 0);
    }
    loop {
        let mut next = states.clone();
        for e in net.entities() {
            let cur = states[e];
            if cur == 0 || hardened.contains(e) || net.hardened().contains(e) {
                continue;
            }
            if let Some(idr) = net.idrs().get(e) {
                let v = oracle_eval(&idr.expr, &states, model);
                next.insert(*e, cur.min(v));
            } else if let Some((a, b)) = e.link_endpoints() {
                if net.contains(a) && net.contains(b) && states[&a] == 0 && states[&b] == 0 {
                    next.insert(*e, 0);
                }
            }
        }
        if next == states {
            return states;
        }
        states = next;
    }
}

pub fn oracle_damage(
    net: &Network,
    final_states: &BTreeMap<EntityId, u8>,
    metric: DamageMetric,
) -> usize {
    let before: BTreeMap<EntityId, u8> =
        net.entities().iter().zip(net.states()).map(|(e, v)| (*e, *v)).collect();
    match metric {
        DamageMetric::FailedCount => net
            .entities()
            .iter()
            .filter(|e| before[e] > 0 && final_states[*e] == 0)
            .count(),
        DamageMetric::StateLoss => net
            .entities()
            .iter()
            .map(|e| before[e].saturating_sub(final_states[e]) as usize)
            .sum(),
    }
}

/// Bitmask K-subset enumeration over the eligible entities; returns the
/// best damage and every subset achieving it (canonically ordered).
pub fn oracle_best_k(
    net: &Network,
    k: usize,
    metric: DamageMetric,
    model: EvalModel,
) -> (usize, Vec<Vec<EntityId>>) {
    // Settle the baseline exactly as the engine contract specifies.
    let steady = oracle_cascade(net, &BTreeSet::new(), &BTreeSet::new(), model);
    let mut base = net.clone();
    for (e, v) in &steady {
        base.set_state(*e, gridcon::state::OperationalState::from_value(*v).unwrap()).unwrap();
    }
    let pool: Vec<EntityId> = base.eligible_entities();
    let n = pool.len();
    assert!(n < 24, "oracle is exponential; keep test networks small");
    let mut best = 0usize;
    let mut winners: Vec<Vec<EntityId>> = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let subset: BTreeSet<EntityId> =
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| pool[i]).collect();
        let fin = oracle_cascade(&base, &subset, &BTreeSet::new(), model);
        let d = oracle_damage(&base, &fin, metric);
        match d.cmp(&best) {
            std::cmp::Ordering::Greater => {
                best = d;
                winners = vec![subset.into_iter().collect()];
            }
            std::cmp::Ordering::Equal => winners.push(subset.into_iter().collect()),
            std::cmp::Ordering::Less => {}
        }
    }
    winners.sort();
    (best, winners)
}

/// Edge list helper for trials that need arbitrary failure sets.
pub fn failure_candidates(net: &Network) -> Vec<EntityId> {
    net.entities()
        .iter()
        .copied()
        .filter(|e| !net.hardened().contains(e))
        .collect()
}

#[allow(dead_code)]
pub fn edgesets_len(edges: &EdgeSets) -> usize {
    edges.pp.len() + edges.cc.len() + edges.pc.len()
}
