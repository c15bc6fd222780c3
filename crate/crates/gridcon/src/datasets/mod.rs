//! Deterministic builders for the bundled IEEE 14-bus and IEEE 118-bus
//! smart-grid networks.
//!
//! The transmission topology, substation tables, control centers, and
//! entity counts follow the published system descriptions. The
//! communication wiring (which substations host which ring nodes, feed
//! assignments, battery placement) is synthesized by one deterministic
//! scheme shared by both builders:
//!
//! - every substation has one server, one gateway, a LAN wire between
//!   them, an RTU with its channel, and supply lines from each member bus
//! - buses depend on a max-OR over (line & neighbor-bus) feed terms
//! - servers and gateways depend on their supply feed and on each other
//!   through the LAN; battery-backed substations blend the feed with the
//!   battery supply through new-XOR, which yields reduced operation when
//!   exactly one source is up
//! - SADMs/OADMs are homed at substations and depend on their drop fiber
//!   plus the host server and gateway (station DC power); ring membership
//!   is a single cycle in id order

mod ieee118;
mod ieee14;

pub use ieee118::build_ieee118;
pub use ieee14::build_ieee14;

use std::collections::{BTreeMap, BTreeSet};

use crate::entity::EntityId;
use crate::error::Result;
use crate::network::{Annotations, EdgeSets, Network, Substation};
use crate::parser;
use crate::state::OperationalState;

/// Substation description consumed by the shared builder.
pub(crate) struct SubSpec {
    pub id: u32,
    pub buses: Vec<u32>,
    /// Buses supplying the substation's server and gateway. Defaults to the
    /// member buses; single-bus substations may add a backup feeder bus.
    pub feeds: Vec<u32>,
    pub zone: u32,
    pub battery: bool,
}

/// Ring-node description: `home` is the hosting substation.
pub(crate) struct RingSpec {
    pub id: u32,
    pub home: u32,
}

pub(crate) struct GridSpec {
    pub branches: Vec<(u32, u32)>,
    pub substations: Vec<SubSpec>,
    pub sadms: Vec<RingSpec>,
    pub oadms: Vec<RingSpec>,
    /// Extra drop fibers (ring node, substation) for substations that do
    /// not host a ring node themselves. `true` marks a SONET attachment.
    pub foreign_fibers: Vec<(bool, u32, u32)>,
    pub generators: Vec<u32>,
    pub pmu_buses: Vec<u32>,
    pub control_centers: Vec<u32>,
}

pub(crate) fn build_grid(spec: &GridSpec) -> Result<Network> {
    let mut entities: BTreeSet<EntityId> = BTreeSet::new();
    let mut idr_lines: Vec<String> = Vec::new();
    let mut edges = EdgeSets::default();
    let mut substations: BTreeMap<u32, Substation> = BTreeMap::new();

    let mut neighbors: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for &(a, b) in &spec.branches {
        neighbors.entry(a).or_default().insert(b);
        neighbors.entry(b).or_default().insert(a);
        entities.insert(EntityId::line(a, b));
        edges.pp.insert((EntityId::bus(a.min(b)), EntityId::bus(a.max(b))));
    }

    for (&bus, nbrs) in &neighbors {
        entities.insert(EntityId::bus(bus));
        let terms: Vec<String> = nbrs
            .iter()
            .map(|n| format!("(PL{}_{} & P{})", bus.min(*n), bus.max(*n), n))
            .collect();
        idr_lines.push(format!("P{bus} <- {}", terms.join(" | ")));
    }

    let bus_substation: BTreeMap<u32, u32> = spec
        .substations
        .iter()
        .flat_map(|s| s.buses.iter().map(move |b| (*b, s.id)))
        .collect();

    for sub in &spec.substations {
        let z = sub.id;
        let srv = EntityId::server(z, z);
        let gw = EntityId::gateway(z, z);
        let lan = EntityId::lan_wire(z, z);
        let rtu = EntityId::rtu(z);
        let rtu_chan = EntityId::rtu_channel(z, z);
        entities.extend([srv, gw, lan, rtu, rtu_chan]);
        edges.cc.insert(ordered(srv, gw));
        edges.cc.insert(ordered(rtu, gw));

        let mut comm: BTreeSet<EntityId> = [srv, gw, lan].into();
        let mut feed_srv: Vec<String> = Vec::new();
        let mut feed_gw: Vec<String> = Vec::new();
        for &bus in &sub.feeds {
            // Backup feeder lines (non-member buses) get ids offset by the
            // substation so every supply line entity is unique.
            let line_id = if sub.buses.contains(&bus) { bus } else { 100 * z + bus };
            let l1 = EntityId::supply_line(1, line_id);
            let l2 = EntityId::supply_line(2, line_id);
            entities.extend([l1, l2]);
            edges.pc.insert(ordered(EntityId::bus(bus), srv));
            edges.pc.insert(ordered(EntityId::bus(bus), gw));
            feed_srv.push(format!("(L1_{line_id} & P{bus})"));
            feed_gw.push(format!("(L2_{line_id} & P{bus})"));
        }
        for &bus in &sub.buses {
            edges.pc.insert(ordered(EntityId::bus(bus), rtu));
        }
        let mut srv_supply = or_join(&feed_srv);
        let mut gw_supply = or_join(&feed_gw);
        if sub.battery {
            let batt = EntityId::battery(z);
            let l5 = EntityId::supply_line(5, z);
            let l6 = EntityId::supply_line(6, z);
            entities.extend([batt, l5, l6]);
            edges.pc.insert(ordered(batt, srv));
            edges.pc.insert(ordered(batt, gw));
            srv_supply = format!("({srv_supply} # (L5_{z} & PBATT{z}))");
            gw_supply = format!("({gw_supply} # (L6_{z} & PBATT{z}))");
        }
        idr_lines.push(format!("C1_1_{z}_{z} <- {srv_supply} & (C1_3_{z}_{z} & C1_2_{z}_{z})"));
        idr_lines.push(format!("C1_2_{z}_{z} <- {gw_supply} & (C1_3_{z}_{z} & C1_1_{z}_{z})"));

        substations.insert(
            z,
            Substation {
                buses: sub.buses.iter().map(|b| EntityId::bus(*b)).collect(),
                comm: std::mem::take(&mut comm),
                zone: sub.zone,
            },
        );
    }

    // PMUs live on annotated buses and report through the bus's gateway.
    for &bus in &spec.pmu_buses {
        let sub = bus_substation[&bus];
        let pmu = EntityId::pmu(bus);
        let chan = EntityId::pmu_channel(bus, sub);
        entities.extend([pmu, chan]);
        edges.pc.insert(ordered(EntityId::bus(bus), pmu));
        edges.cc.insert(ordered(pmu, EntityId::gateway(sub, sub)));
    }

    for (sonet, nodes) in [(true, &spec.sadms), (false, &spec.oadms)] {
        for node in nodes.iter() {
            let (dev, fiber) = if sonet {
                (EntityId::sadm(node.id), EntityId::sadm_fiber(node.id, node.home))
            } else {
                (EntityId::oadm(node.id), EntityId::oadm_fiber(node.id, node.home))
            };
            let z = node.home;
            entities.extend([dev, fiber]);
            edges.cc.insert(ordered(dev, EntityId::gateway(z, z)));
            let fiber_tok = fiber.to_string();
            idr_lines.push(format!("{dev} <- {fiber_tok} & C1_2_{z}_{z} & C1_1_{z}_{z}"));
            substations.get_mut(&z).expect("ring node homed at known substation").comm.insert(dev);
        }
        // Ring channels close a single cycle in id order.
        let ids: Vec<u32> = nodes.iter().map(|n| n.id).collect();
        if ids.len() >= 2 {
            for (i, &a) in ids.iter().enumerate() {
                let b = ids[(i + 1) % ids.len()];
                let (chan, ea, eb) = if sonet {
                    (EntityId::sonet_fiber(a, b), EntityId::sadm(a), EntityId::sadm(b))
                } else {
                    (EntityId::dwdm_fiber(a, b), EntityId::oadm(a), EntityId::oadm(b))
                };
                entities.insert(chan);
                edges.cc.insert(ordered(ea, eb));
            }
        }
    }

    for &(sonet, node, sub) in &spec.foreign_fibers {
        let gw = EntityId::gateway(sub, sub);
        let (dev, fiber) = if sonet {
            (EntityId::sadm(node), EntityId::sadm_fiber(node, sub))
        } else {
            (EntityId::oadm(node), EntityId::oadm_fiber(node, sub))
        };
        entities.extend([fiber]);
        edges.cc.insert(ordered(dev, gw));
    }

    let idrs = idr_lines
        .iter()
        .enumerate()
        .map(|(i, line)| parser::parse_idr_line(line, i + 1))
        .collect::<Result<Vec<_>>>()?;

    let annotations = Annotations {
        generators: spec.generators.iter().map(|b| EntityId::bus(*b)).collect(),
        pmu_buses: spec.pmu_buses.iter().map(|b| EntityId::bus(*b)).collect(),
        substations,
        control_centers: spec.control_centers.iter().copied().collect(),
    };

    Network::build(entities, idrs, edges, annotations, BTreeMap::new(), BTreeSet::new())
}

fn ordered(a: EntityId, b: EntityId) -> (EntityId, EntityId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn or_join(terms: &[String]) -> String {
    if terms.len() == 1 {
        terms[0].clone()
    } else {
        format!("({})", terms.join(" | "))
    }
}

/// Apply a failure to a fresh copy of a network's state table.
pub fn with_failed(net: &Network, failed: &[EntityId]) -> Result<Network> {
    let mut out = net.clone();
    for e in failed {
        out.set_state(*e, OperationalState::Failed)?;
    }
    Ok(out)
}
