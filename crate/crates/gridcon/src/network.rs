//! The joint network: entity set, IDR map, edge classes, annotations, and
//! the live state table.
//!
//! Internally every entity is interned to a dense index so the cascade
//! engine can work on flat `Vec<u8>` state tables; the public surface
//! speaks `EntityId`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entity::EntityId;
use crate::error::{Error, Result};
use crate::idr::{Idr, IdrExpression};
use crate::parser;
use crate::state::OperationalState;

/// One substation: member buses, member communication entities, zone label.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substation {
    pub buses: BTreeSet<EntityId>,
    pub comm: BTreeSet<EntityId>,
    pub zone: u32,
}

/// Grid-level annotations used by the contingency heuristic and the games.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotations {
    #[serde(default)]
    pub generators: BTreeSet<EntityId>,
    #[serde(default)]
    pub pmu_buses: BTreeSet<EntityId>,
    #[serde(default)]
    pub substations: BTreeMap<u32, Substation>,
    #[serde(default)]
    pub control_centers: BTreeSet<u32>,
}

/// The three edge classes of the joint graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSets {
    #[serde(default)]
    pub pp: BTreeSet<(EntityId, EntityId)>,
    #[serde(default)]
    pub cc: BTreeSet<(EntityId, EntityId)>,
    #[serde(default)]
    pub pc: BTreeSet<(EntityId, EntityId)>,
}

impl EdgeSets {
    /// Drop every edge incident to any of the given entities.
    pub fn remove_incident(&mut self, entities: &BTreeSet<EntityId>) {
        let keep = |pair: &(EntityId, EntityId)| !entities.contains(&pair.0) && !entities.contains(&pair.1);
        self.pp.retain(keep);
        self.cc.retain(keep);
        self.pc.retain(keep);
    }
}

fn normalize_pair(a: EntityId, b: EntityId) -> (EntityId, EntityId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// IDR expression with leaves resolved to dense entity indices.
#[derive(Debug, Clone)]
pub(crate) enum CompiledExpr {
    Leaf(u32),
    MinAnd(Vec<CompiledExpr>),
    MaxOr(Vec<CompiledExpr>),
    NewXor(Vec<CompiledExpr>),
}

impl CompiledExpr {
    fn compile(expr: &IdrExpression, index: &HashMap<EntityId, usize>) -> Result<Self> {
        Ok(match expr {
            IdrExpression::Leaf(e) => {
                let i = *index.get(e).ok_or(Error::UnknownEntity(*e))?;
                CompiledExpr::Leaf(i as u32)
            }
            IdrExpression::MinAnd(cs) => {
                CompiledExpr::MinAnd(cs.iter().map(|c| Self::compile(c, index)).collect::<Result<_>>()?)
            }
            IdrExpression::MaxOr(cs) => {
                CompiledExpr::MaxOr(cs.iter().map(|c| Self::compile(c, index)).collect::<Result<_>>()?)
            }
            IdrExpression::NewXor(cs) => {
                CompiledExpr::NewXor(cs.iter().map(|c| Self::compile(c, index)).collect::<Result<_>>()?)
            }
        })
    }

    /// MIIM evaluation over a flat state table.
    pub(crate) fn eval_miim(&self, states: &[u8]) -> u8 {
        match self {
            CompiledExpr::Leaf(i) => states[*i as usize],
            CompiledExpr::MinAnd(cs) => cs.iter().map(|c| c.eval_miim(states)).min().unwrap_or(2),
            CompiledExpr::MaxOr(cs) => cs.iter().map(|c| c.eval_miim(states)).max().unwrap_or(0),
            CompiledExpr::NewXor(cs) => {
                let first = cs[0].eval_miim(states);
                if cs[1..].iter().all(|c| c.eval_miim(states) == first) {
                    first
                } else {
                    1
                }
            }
        }
    }

    /// IIM evaluation: min-AND and new-XOR both collapse to minimum.
    /// States must be binary; the caller validates that up front.
    pub(crate) fn eval_iim(&self, states: &[u8]) -> u8 {
        match self {
            CompiledExpr::Leaf(i) => states[*i as usize],
            CompiledExpr::MinAnd(cs) | CompiledExpr::NewXor(cs) => {
                cs.iter().map(|c| c.eval_iim(states)).min().unwrap_or(2)
            }
            CompiledExpr::MaxOr(cs) => cs.iter().map(|c| c.eval_iim(states)).max().unwrap_or(0),
        }
    }
}

/// On-disk document form of a network: a single JSON object.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct NetworkDocument {
    pub entities: Vec<String>,
    #[serde(default)]
    pub idrs: Vec<String>,
    #[serde(default)]
    pub edges: RawEdges,
    #[serde(default)]
    pub annotations: Annotations,
    #[serde(default)]
    pub initial_states: BTreeMap<String, u8>,
    #[serde(default)]
    pub hardened: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawEdges {
    #[serde(default)]
    pub pp: Vec<(String, String)>,
    #[serde(default)]
    pub cc: Vec<(String, String)>,
    #[serde(default)]
    pub pc: Vec<(String, String)>,
}

#[derive(Clone)]
pub struct Network {
    entities: Vec<EntityId>,
    index: HashMap<EntityId, usize>,
    idrs: BTreeMap<EntityId, Idr>,
    compiled: Vec<Option<CompiledExpr>>,
    /// Both-ends failure rule for channel entities whose endpoints are
    /// index-derivable and present: (endpoint_a, endpoint_b).
    links: Vec<Option<(u32, u32)>>,
    pub edges: EdgeSets,
    pub annotations: Annotations,
    states: Vec<u8>,
    hardened: BTreeSet<EntityId>,
    hardened_mask: Vec<bool>,
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("entities", &self.entities.len())
            .field("idrs", &self.idrs.len())
            .field("hardened", &self.hardened.len())
            .finish()
    }
}

impl Network {
    pub fn build(
        entities: BTreeSet<EntityId>,
        idrs: Vec<Idr>,
        edges: EdgeSets,
        annotations: Annotations,
        initial_states: BTreeMap<EntityId, OperationalState>,
        hardened: BTreeSet<EntityId>,
    ) -> Result<Self> {
        let entity_vec: Vec<EntityId> = entities.iter().copied().collect();
        let index: HashMap<EntityId, usize> =
            entity_vec.iter().enumerate().map(|(i, e)| (*e, i)).collect();

        let mut idr_map = BTreeMap::new();
        for idr in idrs {
            if !index.contains_key(&idr.target) {
                return Err(Error::UnknownEntity(idr.target));
            }
            for leaf in idr.expr.leaves() {
                if !index.contains_key(&leaf) {
                    return Err(Error::UnknownEntity(leaf));
                }
            }
            if idr_map.insert(idr.target, idr.clone()).is_some() {
                return Err(Error::DuplicateIdr(idr.target));
            }
        }

        let mut norm_edges = EdgeSets::default();
        for (set, out) in [
            (&edges.pp, &mut norm_edges.pp),
            (&edges.cc, &mut norm_edges.cc),
            (&edges.pc, &mut norm_edges.pc),
        ] {
            for (a, b) in set {
                if a == b {
                    return Err(Error::MalformedEdge(format!("self-loop on `{a}`")));
                }
                for e in [a, b] {
                    if !index.contains_key(e) {
                        return Err(Error::DanglingEdge(*e));
                    }
                }
                out.insert(normalize_pair(*a, *b));
            }
        }

        for bus in annotations.generators.iter().chain(annotations.pmu_buses.iter()) {
            if !index.contains_key(bus) {
                return Err(Error::UnknownEntity(*bus));
            }
        }
        let mut seen_buses: BTreeSet<EntityId> = BTreeSet::new();
        for sub in annotations.substations.values() {
            for e in sub.buses.iter().chain(sub.comm.iter()) {
                if !index.contains_key(e) {
                    return Err(Error::UnknownEntity(*e));
                }
            }
            for bus in &sub.buses {
                if !seen_buses.insert(*bus) {
                    return Err(Error::BadDocument(format!(
                        "bus `{bus}` appears in more than one substation"
                    )));
                }
            }
        }
        for cc in &annotations.control_centers {
            if !annotations.substations.contains_key(cc) {
                return Err(Error::BadDocument(format!("control center {cc} is not a substation")));
            }
        }

        let mut states = vec![2u8; entity_vec.len()];
        for (e, s) in &initial_states {
            let i = *index.get(e).ok_or(Error::UnknownEntity(*e))?;
            states[i] = s.value();
        }
        for h in &hardened {
            if !index.contains_key(h) {
                return Err(Error::UnknownEntity(*h));
            }
        }

        let compiled = entity_vec
            .iter()
            .map(|e| idr_map.get(e).map(|idr| CompiledExpr::compile(&idr.expr, &index)).transpose())
            .collect::<Result<Vec<_>>>()?;

        let links = entity_vec
            .iter()
            .map(|e| {
                e.link_endpoints().and_then(|(a, b)| {
                    let ia = index.get(&a)?;
                    let ib = index.get(&b)?;
                    Some((*ia as u32, *ib as u32))
                })
            })
            .collect();

        let mut hardened_mask = vec![false; entity_vec.len()];
        for h in &hardened {
            hardened_mask[index[h]] = true;
        }

        Ok(Network {
            entities: entity_vec,
            index,
            idrs: idr_map,
            compiled,
            links,
            edges: norm_edges,
            annotations,
            states,
            hardened,
            hardened_mask,
        })
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    pub fn contains(&self, e: EntityId) -> bool {
        self.index.contains_key(&e)
    }

    pub fn index_of(&self, e: EntityId) -> Result<usize> {
        self.index.get(&e).copied().ok_or(Error::UnknownEntity(e))
    }

    pub fn entity_at(&self, i: usize) -> EntityId {
        self.entities[i]
    }

    pub fn idrs(&self) -> &BTreeMap<EntityId, Idr> {
        &self.idrs
    }

    pub fn has_idr(&self, e: EntityId) -> bool {
        self.idrs.contains_key(&e)
    }

    pub(crate) fn compiled(&self, i: usize) -> Option<&CompiledExpr> {
        self.compiled[i].as_ref()
    }

    pub(crate) fn link(&self, i: usize) -> Option<(u32, u32)> {
        self.links[i]
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn state_of(&self, e: EntityId) -> Result<OperationalState> {
        let i = self.index_of(e)?;
        OperationalState::from_value(self.states[i])
    }

    pub fn state_map(&self) -> BTreeMap<EntityId, OperationalState> {
        self.entities
            .iter()
            .zip(&self.states)
            .map(|(e, v)| (*e, OperationalState::from_value(*v).unwrap()))
            .collect()
    }

    pub fn set_state(&mut self, e: EntityId, s: OperationalState) -> Result<()> {
        let i = self.index_of(e)?;
        self.states[i] = s.value();
        Ok(())
    }

    pub(crate) fn set_states_raw(&mut self, states: Vec<u8>) {
        debug_assert_eq!(states.len(), self.entities.len());
        self.states = states;
    }

    pub fn hardened(&self) -> &BTreeSet<EntityId> {
        &self.hardened
    }

    pub fn is_hardened(&self, e: EntityId) -> bool {
        self.hardened.contains(&e)
    }

    pub(crate) fn hardened_mask(&self) -> &[bool] {
        &self.hardened_mask
    }

    pub fn harden(&mut self, e: EntityId) -> Result<()> {
        let i = self.index_of(e)?;
        self.hardened.insert(e);
        self.hardened_mask[i] = true;
        Ok(())
    }

    /// Isolation hardening: additionally remove every edge incident to the
    /// entity so it no longer appears in the graph abstractions or the
    /// channel failure rule.
    pub fn harden_isolated(&mut self, e: EntityId) -> Result<()> {
        self.harden(e)?;
        let mut set = BTreeSet::new();
        set.insert(e);
        self.edges.remove_incident(&set);
        let idx = self.index_of(e)? as u32;
        for l in self.links.iter_mut() {
            if matches!(l, Some((a, b)) if *a == idx || *b == idx) {
                *l = None;
            }
        }
        Ok(())
    }

    /// Buses, in canonical order.
    pub fn buses(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.entities.iter().copied().filter(|e| e.is_bus())
    }

    /// Non-channel communication entities (V_C), in canonical order.
    pub fn comm_terminals(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.entities.iter().copied().filter(|e| e.is_comm_terminal())
    }

    /// Entities a contingency may select: operational, non-hardened
    /// V_P/V_C vertices.
    pub fn eligible_entities(&self) -> Vec<EntityId> {
        self.entities
            .iter()
            .copied()
            .filter(|e| {
                e.is_contingency_eligible()
                    && !self.hardened.contains(e)
                    && self.states[self.index[e]] > 0
            })
            .collect()
    }

    /// E_PP adjacency restricted to operational, non-hardened buses.
    pub fn power_adjacency(&self) -> BTreeMap<EntityId, BTreeSet<EntityId>> {
        let alive = |e: &EntityId| {
            e.is_bus() && !self.hardened.contains(e) && self.states[self.index[e]] > 0
        };
        let mut adj: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
        for e in self.entities.iter().filter(|e| alive(e)) {
            adj.entry(*e).or_default();
        }
        for (a, b) in &self.edges.pp {
            if alive(a) && alive(b) {
                adj.entry(*a).or_default().insert(*b);
                adj.entry(*b).or_default().insert(*a);
            }
        }
        adj
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            entities: self.entities.iter().map(|e| e.to_string()).collect(),
            idrs: self.idrs.values().map(|i| i.to_string()).collect(),
            edges: RawEdges {
                pp: self.edges.pp.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                cc: self.edges.cc.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                pc: self.edges.pc.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            },
            annotations: self.annotations.clone(),
            initial_states: self
                .entities
                .iter()
                .zip(&self.states)
                .filter(|(_, v)| **v != 2)
                .map(|(e, v)| (e.to_string(), *v))
                .collect(),
            hardened: self.hardened.iter().map(|e| e.to_string()).collect(),
        }
    }

    pub fn from_document(doc: &NetworkDocument) -> Result<Self> {
        let mut entities = BTreeSet::new();
        for t in &doc.entities {
            entities.insert(t.parse::<EntityId>()?);
        }
        let mut idrs = Vec::new();
        for (i, line) in doc.idrs.iter().enumerate() {
            idrs.push(parser::parse_idr_line(line, i + 1)?);
        }
        let mut edges = EdgeSets::default();
        for (raw, out) in
            [(&doc.edges.pp, &mut edges.pp), (&doc.edges.cc, &mut edges.cc), (&doc.edges.pc, &mut edges.pc)]
        {
            for (a, b) in raw {
                out.insert(normalize_pair(a.parse()?, b.parse()?));
            }
        }
        let mut initial_states = BTreeMap::new();
        for (t, v) in &doc.initial_states {
            initial_states.insert(t.parse::<EntityId>()?, OperationalState::from_value(*v)?);
        }
        let mut hardened = BTreeSet::new();
        for t in &doc.hardened {
            hardened.insert(t.parse::<EntityId>()?);
        }
        Network::build(entities, idrs, edges, doc.annotations.clone(), initial_states, hardened)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDocument = serde_json::from_str(text)?;
        Network::from_document(&doc)
    }
}

/// Load a network document from JSON text.
pub fn load_network(text: &str) -> Result<Network> {
    Network::from_json(text)
}

/// Serialize a network to canonical JSON.
pub fn save_network(net: &Network) -> String {
    net.to_json()
}
