//! Exhaustive K-contingency search: the optimality oracle.
//!
//! Enumerates every K-subset of the eligible entities, runs each cascade
//! to steady state, and returns the full argmax tie group. Subset
//! evaluation fans out across a rayon pool; the reduction is a
//! deterministic (damage, canonical order) merge.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::cascade::{damage, run_cascade, settled, DamageMetric};
use crate::entity::EntityId;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::state::EvalModel;

use super::{ContingencyResult, SolverKind};

/// All k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let remaining = k - cur.len();
        for i in start..=n.saturating_sub(remaining) {
            cur.push(i as u32);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Exact K-contingency over an explicit candidate pool. The network state
/// is settled first so damage is measured from a steady baseline.
pub fn exact_k_over(
    net: &Network,
    pool: &[EntityId],
    k: usize,
    metric: DamageMetric,
    model: EvalModel,
) -> Result<ContingencyResult> {
    if k == 0 || k > pool.len() {
        return Err(Error::KExceedsEligible { k, eligible: pool.len() });
    }
    let base = settled(net, model)?;

    let combos = combinations(pool.len(), k);
    let scored: Vec<(usize, Vec<EntityId>)> = combos
        .par_iter()
        .map(|combo| {
            let set: BTreeSet<EntityId> = combo.iter().map(|i| pool[*i as usize]).collect();
            let trace = run_cascade(&base, &set, &BTreeSet::new(), model)
                .expect("eligible candidates are alive and unhardened");
            (damage(&trace, metric), set.into_iter().collect::<Vec<_>>())
        })
        .collect();

    let best = scored.iter().map(|(d, _)| *d).max().unwrap_or(0);
    let ties: Vec<(usize, Vec<EntityId>)> =
        scored.into_iter().filter(|(d, _)| *d == best).collect();
    Ok(ContingencyResult::from_scored(k, ties, metric, SolverKind::Exact))
}

/// Exact K-contingency over every operational, non-hardened node entity.
pub fn exact_k_contingency(
    net: &Network,
    k: usize,
    metric: DamageMetric,
    model: EvalModel,
) -> Result<ContingencyResult> {
    let base = settled(net, model)?;
    let pool = base.eligible_entities();
    exact_k_over(net, &pool, k, metric, model)
}
