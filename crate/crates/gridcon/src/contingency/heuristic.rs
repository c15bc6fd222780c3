//! Graph-coloring contingency heuristic.
//!
//! Candidate generation works on the power subgraph G1 = (V_P, E_PP):
//! K=1 scores the neighbors of pendant buses (or the minimum-degree buses
//! when no pendant exists); K=2 pairs the red winners with red, green,
//! yellow, and blue vertices and separately scores pairs of grey vertices
//! (neighbors of degree-2 buses); K>2 repeatedly extracts K=2 winners from
//! a shrinking copy of the graph and recombines them.
//!
//! When the network already has failed entities, communication vertices
//! that have lost every bus feed or every live communication neighbor are
//! folded into the red candidate pool (the self-updating augmentation),
//! which is how substation terminals enter the list after a bus failure.

use std::collections::{BTreeMap, BTreeSet};

use crate::cascade::{damage, run_cascade, settled, DamageMetric};
use crate::entity::EntityId;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::state::EvalModel;

use super::coloring::{color_base, Color, ColoringState};
use super::{ContingencyResult, SolverKind};

type Adjacency = BTreeMap<EntityId, BTreeSet<EntityId>>;

/// Communication vertices rendered contingent by the current failed set:
/// every bus-side supply edge or every live communication-side edge leads
/// to a failed or already-contingent entity. Computed as a closure.
pub fn augment_contingent(net: &Network, failed: &BTreeSet<EntityId>) -> BTreeSet<EntityId> {
    let mut pc_bus: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
    for (a, b) in &net.edges.pc {
        for (v, other) in [(a, b), (b, a)] {
            if v.is_comm_terminal() && other.is_bus() {
                pc_bus.entry(*v).or_default().insert(*other);
            }
        }
    }
    let mut cc_vc: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
    for (a, b) in &net.edges.cc {
        for (v, other) in [(a, b), (b, a)] {
            if v.is_comm_terminal() && other.is_comm_terminal() {
                cc_vc.entry(*v).or_default().insert(*other);
            }
        }
    }

    let mut marked: BTreeSet<EntityId> = failed.clone();
    let mut added = BTreeSet::new();
    loop {
        let mut changed = false;
        for v in net.comm_terminals() {
            if marked.contains(&v) || net.is_hardened(v) {
                continue;
            }
            let power_cut = pc_bus
                .get(&v)
                .map(|nbrs| !nbrs.is_empty() && nbrs.iter().all(|n| marked.contains(n)))
                .unwrap_or(false);
            let comm_cut = cc_vc
                .get(&v)
                .map(|nbrs| !nbrs.is_empty() && nbrs.iter().all(|n| marked.contains(n)))
                .unwrap_or(false);
            if power_cut || comm_cut {
                marked.insert(v);
                added.insert(v);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    added
}

pub struct HeuristicSolver {
    pub coloring: ColoringState,
}

impl Default for HeuristicSolver {
    fn default() -> Self {
        Self::new()
    }
}

struct Ctx {
    base: Network,
    metric: DamageMetric,
    model: EvalModel,
}

impl Ctx {
    fn score(&self, set: &BTreeSet<EntityId>) -> usize {
        let trace = run_cascade(&self.base, set, &BTreeSet::new(), self.model)
            .expect("candidates are operational and unhardened");
        damage(&trace, self.metric)
    }

    fn score_many(&self, sets: Vec<Vec<EntityId>>) -> Vec<(usize, Vec<EntityId>)> {
        sets.into_iter()
            .map(|s| {
                let set: BTreeSet<EntityId> = s.iter().copied().collect();
                (self.score(&set), s)
            })
            .collect()
    }
}

impl HeuristicSolver {
    pub fn new() -> Self {
        HeuristicSolver { coloring: ColoringState::default() }
    }

    /// Red candidates for K=1 plus the augmentation pool, each with its
    /// singleton damage. Sorted bus-first, damage descending, canonical.
    pub fn k1_pool(
        &mut self,
        net: &Network,
        metric: DamageMetric,
        model: EvalModel,
    ) -> Result<Vec<(EntityId, usize)>> {
        let ctx = self.prepare(net, metric, model)?;
        let adj = ctx.base.power_adjacency();
        let reds = self.step3(&ctx, &adj, &BTreeSet::new())?;
        let pool = self.augmented_pool(&ctx, net, reds);
        self.clear_transient();
        Ok(pool)
    }

    pub fn solve(
        &mut self,
        net: &Network,
        k: usize,
        metric: DamageMetric,
        model: EvalModel,
    ) -> Result<ContingencyResult> {
        let ctx = self.prepare(net, metric, model)?;
        let eligible = ctx.base.eligible_entities();
        if k == 0 || k > eligible.len() {
            return Err(Error::KExceedsEligible { k, eligible: eligible.len() });
        }
        let adj = ctx.base.power_adjacency();
        if adj.is_empty() {
            return Err(Error::EmptyPowerGraph);
        }

        let result = match k {
            1 => {
                let reds = self.step3(&ctx, &adj, &BTreeSet::new())?;
                let pool = self.augmented_pool(&ctx, net, reds);
                let scored: Vec<(usize, Vec<EntityId>)> =
                    pool.into_iter().map(|(e, d)| (d, vec![e])).collect();
                ContingencyResult::from_scored(1, scored, metric, SolverKind::Heuristic)
            }
            2 => {
                let scored = self.k2_candidates(&ctx, net, &adj, &BTreeSet::new())?;
                ContingencyResult::from_scored(2, scored, metric, SolverKind::Heuristic)
            }
            _ => self.k_beyond_two(&ctx, net, &adj, k, metric)?,
        };
        self.clear_transient();
        Ok(result)
    }

    fn prepare(&mut self, net: &Network, metric: DamageMetric, model: EvalModel) -> Result<Ctx> {
        let base = settled(net, model)?;
        self.coloring = color_base(&base);
        Ok(Ctx { base, metric, model })
    }

    /// Pendant-neighbor (or minimum-degree) candidates, scored; the argmax
    /// group is colored red.
    fn step3(
        &mut self,
        ctx: &Ctx,
        adj: &Adjacency,
        exclude: &BTreeSet<EntityId>,
    ) -> Result<Vec<(EntityId, usize)>> {
        let usable: Vec<&EntityId> = adj.keys().filter(|e| !exclude.contains(e)).collect();
        if usable.is_empty() {
            return Ok(Vec::new());
        }
        let pendants: Vec<EntityId> = usable
            .iter()
            .filter(|e| adj[*e].iter().filter(|n| !exclude.contains(n)).count() == 1)
            .map(|e| **e)
            .collect();
        let mut pinks: BTreeSet<EntityId> = BTreeSet::new();
        if !pendants.is_empty() {
            for p in &pendants {
                pinks.extend(adj[p].iter().filter(|n| !exclude.contains(n)));
            }
        }
        if pinks.is_empty() {
            let min_deg = usable
                .iter()
                .map(|e| adj[*e].iter().filter(|n| !exclude.contains(n)).count())
                .min()
                .unwrap_or(0);
            pinks = usable
                .iter()
                .filter(|e| adj[*e].iter().filter(|n| !exclude.contains(n)).count() == min_deg)
                .map(|e| **e)
                .collect();
        }

        let previous: BTreeMap<EntityId, Color> =
            pinks.iter().map(|e| (*e, self.coloring.get(*e))).collect();
        for p in &pinks {
            self.coloring.set(*p, Color::Pink);
        }
        let scored: Vec<(EntityId, usize)> = pinks
            .iter()
            .map(|p| {
                let set: BTreeSet<EntityId> = [*p].into();
                (*p, ctx.score(&set))
            })
            .collect();
        let best = scored.iter().map(|(_, d)| *d).max().unwrap_or(0);
        for (e, d) in &scored {
            if *d == best {
                self.coloring.set(*e, Color::Red);
            } else {
                self.coloring.set(*e, previous[e]);
            }
        }
        Ok(scored.into_iter().filter(|(_, d)| *d == best).collect())
    }

    /// Red candidates joined with the augmentation, every entry scored.
    /// Ordering: buses first, then damage descending, then canonical.
    fn augmented_pool(
        &mut self,
        ctx: &Ctx,
        input: &Network,
        reds: Vec<(EntityId, usize)>,
    ) -> Vec<(EntityId, usize)> {
        let failed: BTreeSet<EntityId> = input
            .entities()
            .iter()
            .zip(input.states())
            .filter(|(_, v)| **v == 0)
            .map(|(e, _)| *e)
            .collect();
        let mut pool: BTreeMap<EntityId, usize> = reds.into_iter().collect();
        for c in augment_contingent(&ctx.base, &failed) {
            if ctx.base.state_of(c).map(|s| s.is_operational()).unwrap_or(false) {
                self.coloring.set(c, Color::Red);
                let set: BTreeSet<EntityId> = [c].into();
                pool.entry(c).or_insert_with(|| ctx.score(&set));
            }
        }
        let mut out: Vec<(EntityId, usize)> = pool.into_iter().collect();
        out.sort_by(|(ea, da), (eb, db)| {
            eb.is_bus().cmp(&ea.is_bus()).then(db.cmp(da)).then(ea.cmp(eb))
        });
        out
    }

    /// Step-4 candidate pairs: red x (red | green | yellow | blue) as
    /// List1, grey-vertex pairs as List2; both lists scored jointly.
    fn k2_candidates(
        &mut self,
        ctx: &Ctx,
        input: &Network,
        adj: &Adjacency,
        exclude: &BTreeSet<EntityId>,
    ) -> Result<Vec<(usize, Vec<EntityId>)>> {
        let reds = self.step3(ctx, adj, exclude)?;
        let pool = self.augmented_pool(ctx, input, reds);
        let red_pool: Vec<EntityId> =
            pool.iter().map(|(e, _)| *e).filter(|e| !exclude.contains(e)).collect();

        let mut partners: BTreeSet<EntityId> = red_pool.iter().copied().collect();
        for color in [Color::Green, Color::Yellow, Color::Blue] {
            partners.extend(
                self.coloring
                    .entities_with(color)
                    .into_iter()
                    .filter(|e| adj.contains_key(e) && !exclude.contains(e)),
            );
        }
        let mut list1: Vec<Vec<EntityId>> = Vec::new();
        for r in &red_pool {
            for p in &partners {
                if p != r {
                    let mut pair = vec![*r, *p];
                    pair.sort();
                    list1.push(pair);
                }
            }
        }
        list1.sort();
        list1.dedup();

        // Grey: neighbors of buses with exactly two power edges.
        let mut grey: BTreeSet<EntityId> = BTreeSet::new();
        for (v, nbrs) in adj {
            if exclude.contains(v) {
                continue;
            }
            let live: Vec<&EntityId> = nbrs.iter().filter(|n| !exclude.contains(n)).collect();
            if live.len() == 2 {
                grey.extend(live.into_iter().copied());
            }
        }
        let previous: BTreeMap<EntityId, Color> =
            grey.iter().map(|e| (*e, self.coloring.get(*e))).collect();
        for g in &grey {
            if self.coloring.get(*g) != Color::Red {
                self.coloring.set(*g, Color::Grey);
            }
        }
        let grey_vec: Vec<EntityId> = grey.iter().copied().collect();
        let mut list2: Vec<Vec<EntityId>> = Vec::new();
        for i in 0..grey_vec.len() {
            for j in i + 1..grey_vec.len() {
                list2.push(vec![grey_vec[i], grey_vec[j]]);
            }
        }
        for g in &grey {
            if self.coloring.get(*g) == Color::Grey {
                self.coloring.set(*g, previous[g]);
            }
        }

        let mut scored = ctx.score_many(list1);
        scored.extend(ctx.score_many(list2));
        if scored.is_empty() {
            return Err(Error::EmptyPowerGraph);
        }
        Ok(scored)
    }

    /// Step-5 loop for K > 2: extract K=2 winners from a shrinking graph,
    /// then recombine pair unions (plus a K=1 residual pass for odd K).
    fn k_beyond_two(
        &mut self,
        ctx: &Ctx,
        input: &Network,
        adj: &Adjacency,
        k: usize,
        metric: DamageMetric,
    ) -> Result<ContingencyResult> {
        let pairs_needed = k / 2;
        let mut used: BTreeSet<EntityId> = BTreeSet::new();
        let mut tlist1: Vec<Vec<EntityId>> = Vec::new();
        while disjoint_capacity(&tlist1) < pairs_needed {
            let round = match self.k2_candidates(ctx, input, adj, &used) {
                Ok(scored) => {
                    let best = scored.iter().map(|(d, _)| *d).max().unwrap_or(0);
                    let mut winners: Vec<Vec<EntityId>> = scored
                        .into_iter()
                        .filter(|(d, _)| *d == best)
                        .map(|(_, s)| s)
                        .collect();
                    winners.sort();
                    winners.dedup();
                    winners
                }
                Err(_) => Vec::new(),
            };
            if round.is_empty() {
                break;
            }
            for pair in round {
                used.extend(pair.iter().copied());
                tlist1.push(pair);
            }
        }

        let mut bases: Vec<Vec<EntityId>> = disjoint_unions(&tlist1, pairs_needed, 4096);
        if bases.is_empty() {
            // Exhaustion guard: fill one candidate greedily from repeated
            // K=1 passes over the residual graph.
            let mut set: Vec<EntityId> = tlist1.into_iter().flatten().collect();
            set.sort();
            set.dedup();
            set.truncate(2 * pairs_needed);
            let mut exclude: BTreeSet<EntityId> = set.iter().copied().collect();
            while set.len() < 2 * pairs_needed {
                let reds = self.step3(ctx, adj, &exclude)?;
                match reds.first() {
                    Some((e, _)) => {
                        set.push(*e);
                        exclude.insert(*e);
                    }
                    None => break,
                }
            }
            if set.len() < 2 * pairs_needed {
                return Err(Error::KExceedsEligible { k, eligible: set.len() });
            }
            bases.push(set);
        }

        let mut candidates: Vec<Vec<EntityId>> = Vec::new();
        if k.is_multiple_of(2) {
            candidates = bases;
        } else {
            for base_set in bases {
                let exclude: BTreeSet<EntityId> = base_set.iter().copied().collect();
                let reds = self.step3(ctx, adj, &exclude)?;
                let pool = self.augmented_pool(ctx, input, reds);
                let singles: Vec<EntityId> = pool
                    .iter()
                    .filter(|(e, _)| !exclude.contains(e))
                    .map(|(e, _)| *e)
                    .collect();
                if let Some(best_damage) =
                    pool.iter().filter(|(e, _)| !exclude.contains(e)).map(|(_, d)| *d).max()
                {
                    for (e, d) in pool.iter() {
                        if *d == best_damage && singles.contains(e) {
                            let mut set = base_set.clone();
                            set.push(*e);
                            set.sort();
                            candidates.push(set);
                        }
                    }
                }
            }
        }
        candidates.retain(|s| s.len() == k);
        candidates.sort();
        candidates.dedup();
        if candidates.is_empty() {
            return Err(Error::KExceedsEligible { k, eligible: used.len() });
        }
        let scored = ctx.score_many(candidates);
        Ok(ContingencyResult::from_scored(k, scored, metric, SolverKind::Heuristic))
    }

    fn clear_transient(&mut self) {
        let transient: Vec<EntityId> = self
            .coloring
            .color
            .iter()
            .filter(|(_, c)| matches!(c, Color::Pink | Color::Grey))
            .map(|(e, _)| *e)
            .collect();
        for e in transient {
            self.coloring.set(e, Color::White);
        }
    }
}

/// Number of pairwise-disjoint pairs selectable greedily from the list.
/// Pairs from different rounds never share entities, so this is exact for
/// the step-5 loop guard.
fn disjoint_capacity(pairs: &[Vec<EntityId>]) -> usize {
    let mut used = BTreeSet::new();
    let mut count = 0;
    for p in pairs {
        if p.iter().all(|e| !used.contains(e)) {
            used.extend(p.iter().copied());
            count += 1;
        }
    }
    count
}

/// All unions of `take` pairwise-disjoint pairs, capped for determinism.
fn disjoint_unions(pairs: &[Vec<EntityId>], take: usize, cap: usize) -> Vec<Vec<EntityId>> {
    let mut out = Vec::new();
    if take == 0 {
        return out;
    }
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    while let Some((start, chosen)) = stack.pop() {
        if chosen.len() == take {
            let mut union: Vec<EntityId> =
                chosen.iter().flat_map(|i| pairs[*i].iter().copied()).collect();
            union.sort();
            union.dedup();
            if union.len() == 2 * take {
                out.push(union);
                if out.len() >= cap {
                    break;
                }
            }
            continue;
        }
        for i in (start..pairs.len()).rev() {
            let mut next = chosen.clone();
            next.push(i);
            stack.push((i + 1, next));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One-shot heuristic solve.
pub fn heuristic_k_contingency(
    net: &Network,
    k: usize,
    metric: DamageMetric,
    model: EvalModel,
) -> Result<ContingencyResult> {
    HeuristicSolver::new().solve(net, k, metric, model)
}
