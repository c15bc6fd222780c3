//! Entity identity model for the two-layer grid.
//!
//! Every power, communication, and connector entity has a typed identifier
//! with a canonical token spelling:
//!
//! - `P<a>` bus, `PL<a>_<b>` transmission line, `PBATT<x>` battery
//! - `C1_<x>_<y>_<z>` substation entity (x = 1 server, 2 gateway, 3 LAN wire,
//!   4 SADM fiber, 5 OADM fiber, 6 RTU channel, 7 PMU channel)
//! - `C2_<x>_<y>_<z>` SONET-ring entity (x = 1 SADM, 2 inter-SADM fiber)
//! - `C3_<x>_<y>_<z>` DWDM-ring entity (x = 1 OADM, 2 inter-OADM fiber)
//! - `L<k>_<i>` power supply line (k in 1..=6), `U<i>` PMU, `R<i>` RTU
//!
//! The derived `Ord` (kind order, then indices) is the canonical tie-break
//! order used everywhere results must be deterministic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Typed identifier for every entity in the joint network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityId {
    /// `P<a>`: bus with ID a.
    Bus { id: u32 },
    /// `PL<a>_<b>`: transmission line between bus a and bus b, stored a < b.
    TransmissionLine { a: u32, b: u32 },
    /// `PBATT<x>`: substation battery backup.
    Battery { id: u32 },
    /// `C1_<x>_<y>_<z>`: substation entity; x in 1..=7.
    SubstationEntity { class: u8, device: u32, substation: u32 },
    /// `C2_<x>_<y>_<z>`: SONET-ring entity; x in {1, 2}.
    SonetEntity { class: u8, a: u32, b: u32 },
    /// `C3_<x>_<y>_<z>`: DWDM-ring entity; x in {1, 2}.
    DwdmEntity { class: u8, a: u32, b: u32 },
    /// `L<k>_<i>`: power supply line of class k in 1..=6.
    PowerSupplyLine { class: u8, id: u32 },
    /// `U<i>`: phasor measurement unit.
    Pmu { id: u32 },
    /// `R<i>`: remote terminal unit.
    Rtu { id: u32 },
}

/// Substation-entity classes (the `x` of `C1_x_y_z`).
pub mod sub_class {
    pub const SERVER: u8 = 1;
    pub const GATEWAY: u8 = 2;
    pub const LAN_WIRE: u8 = 3;
    pub const SADM_FIBER: u8 = 4;
    pub const OADM_FIBER: u8 = 5;
    pub const RTU_CHANNEL: u8 = 6;
    pub const PMU_CHANNEL: u8 = 7;
}

impl EntityId {
    pub fn bus(id: u32) -> Self {
        EntityId::Bus { id }
    }

    /// Transmission line, normalized so the lower bus id comes first.
    pub fn line(a: u32, b: u32) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        EntityId::TransmissionLine { a, b }
    }

    pub fn battery(id: u32) -> Self {
        EntityId::Battery { id }
    }

    pub fn server(device: u32, substation: u32) -> Self {
        EntityId::SubstationEntity { class: sub_class::SERVER, device, substation }
    }

    pub fn gateway(device: u32, substation: u32) -> Self {
        EntityId::SubstationEntity { class: sub_class::GATEWAY, device, substation }
    }

    pub fn lan_wire(device: u32, substation: u32) -> Self {
        EntityId::SubstationEntity { class: sub_class::LAN_WIRE, device, substation }
    }

    pub fn sadm_fiber(sadm: u32, gateway: u32) -> Self {
        EntityId::SubstationEntity { class: sub_class::SADM_FIBER, device: sadm, substation: gateway }
    }

    pub fn oadm_fiber(oadm: u32, gateway: u32) -> Self {
        EntityId::SubstationEntity { class: sub_class::OADM_FIBER, device: oadm, substation: gateway }
    }

    pub fn rtu_channel(rtu: u32, substation: u32) -> Self {
        EntityId::SubstationEntity { class: sub_class::RTU_CHANNEL, device: rtu, substation }
    }

    pub fn pmu_channel(pmu: u32, substation: u32) -> Self {
        EntityId::SubstationEntity { class: sub_class::PMU_CHANNEL, device: pmu, substation }
    }

    pub fn sadm(id: u32) -> Self {
        EntityId::SonetEntity { class: 1, a: id, b: 0 }
    }

    pub fn sonet_fiber(a: u32, b: u32) -> Self {
        EntityId::SonetEntity { class: 2, a, b }
    }

    pub fn oadm(id: u32) -> Self {
        EntityId::DwdmEntity { class: 1, a: id, b: 0 }
    }

    pub fn dwdm_fiber(a: u32, b: u32) -> Self {
        EntityId::DwdmEntity { class: 2, a, b }
    }

    pub fn supply_line(class: u8, id: u32) -> Self {
        EntityId::PowerSupplyLine { class, id }
    }

    pub fn pmu(id: u32) -> Self {
        EntityId::Pmu { id }
    }

    pub fn rtu(id: u32) -> Self {
        EntityId::Rtu { id }
    }

    /// P class: buses, transmission lines, batteries.
    pub fn is_power(&self) -> bool {
        matches!(
            self,
            EntityId::Bus { .. } | EntityId::TransmissionLine { .. } | EntityId::Battery { .. }
        )
    }

    /// C class: substation, SONET-ring, and DWDM-ring entities.
    pub fn is_communication(&self) -> bool {
        matches!(
            self,
            EntityId::SubstationEntity { .. } | EntityId::SonetEntity { .. } | EntityId::DwdmEntity { .. }
        )
    }

    /// CP class: supply lines, PMUs, RTUs.
    pub fn is_connector(&self) -> bool {
        matches!(
            self,
            EntityId::PowerSupplyLine { .. } | EntityId::Pmu { .. } | EntityId::Rtu { .. }
        )
    }

    pub fn is_bus(&self) -> bool {
        matches!(self, EntityId::Bus { .. })
    }

    /// A communication entity that is a device rather than a channel:
    /// servers, gateways, SADMs, OADMs. These are the V_C vertices of the
    /// heuristic graph abstraction.
    pub fn is_comm_terminal(&self) -> bool {
        match *self {
            EntityId::SubstationEntity { class, .. } => {
                class == sub_class::SERVER || class == sub_class::GATEWAY
            }
            EntityId::SonetEntity { class, .. } | EntityId::DwdmEntity { class, .. } => class == 1,
            _ => false,
        }
    }

    /// Channel-like entities: transmission lines, LAN wires, fibers,
    /// RTU/PMU channels, ring fibers, supply lines. They carry no IDR and
    /// fail only when both endpoints fail.
    pub fn is_link(&self) -> bool {
        match *self {
            EntityId::TransmissionLine { .. } | EntityId::PowerSupplyLine { .. } => true,
            EntityId::SubstationEntity { class, .. } => class >= sub_class::LAN_WIRE,
            EntityId::SonetEntity { class, .. } | EntityId::DwdmEntity { class, .. } => class == 2,
            _ => false,
        }
    }

    /// Eligible for contingency selection: V_P (buses) and V_C (comm
    /// terminals). Edges and connector entities cannot be most critical.
    pub fn is_contingency_eligible(&self) -> bool {
        self.is_bus() || self.is_comm_terminal()
    }

    /// Endpoint entities of a channel, derived from its indices by the
    /// token conventions. Returns None for non-links and for supply lines,
    /// whose feeding entity is not index-derivable.
    pub fn link_endpoints(&self) -> Option<(EntityId, EntityId)> {
        match *self {
            EntityId::TransmissionLine { a, b } => Some((EntityId::bus(a), EntityId::bus(b))),
            EntityId::SubstationEntity { class, device, substation } => match class {
                sub_class::LAN_WIRE => Some((
                    EntityId::server(device, substation),
                    EntityId::gateway(device, substation),
                )),
                sub_class::SADM_FIBER => Some((
                    EntityId::sadm(device),
                    EntityId::gateway(substation, substation),
                )),
                sub_class::OADM_FIBER => Some((
                    EntityId::oadm(device),
                    EntityId::gateway(substation, substation),
                )),
                sub_class::RTU_CHANNEL => Some((
                    EntityId::rtu(device),
                    EntityId::gateway(substation, substation),
                )),
                sub_class::PMU_CHANNEL => Some((
                    EntityId::pmu(device),
                    EntityId::gateway(substation, substation),
                )),
                _ => None,
            },
            EntityId::SonetEntity { class: 2, a, b } => Some((EntityId::sadm(a), EntityId::sadm(b))),
            EntityId::DwdmEntity { class: 2, a, b } => Some((EntityId::oadm(a), EntityId::oadm(b))),
            _ => None,
        }
    }

    fn validate(self) -> Result<Self, Error> {
        let ok = match self {
            EntityId::TransmissionLine { a, b } => a != b,
            EntityId::SubstationEntity { class, .. } => (1..=7).contains(&class),
            EntityId::SonetEntity { class, a, b } => {
                (1..=2).contains(&class) && (class != 1 || b == 0) && (class != 2 || a != b)
            }
            EntityId::DwdmEntity { class, a, b } => {
                (1..=2).contains(&class) && (class != 1 || b == 0) && (class != 2 || a != b)
            }
            EntityId::PowerSupplyLine { class, .. } => (1..=6).contains(&class),
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::BadEntityToken(self.to_string()))
        }
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EntityId::Bus { id } => write!(f, "P{id}"),
            EntityId::TransmissionLine { a, b } => write!(f, "PL{a}_{b}"),
            EntityId::Battery { id } => write!(f, "PBATT{id}"),
            EntityId::SubstationEntity { class, device, substation } => {
                write!(f, "C1_{class}_{device}_{substation}")
            }
            EntityId::SonetEntity { class, a, b } => write!(f, "C2_{class}_{a}_{b}"),
            EntityId::DwdmEntity { class, a, b } => write!(f, "C3_{class}_{a}_{b}"),
            EntityId::PowerSupplyLine { class, id } => write!(f, "L{class}_{id}"),
            EntityId::Pmu { id } => write!(f, "U{id}"),
            EntityId::Rtu { id } => write!(f, "R{id}"),
        }
    }
}

fn parse_u32(s: &str, token: &str) -> Result<u32, Error> {
    s.parse::<u32>().map_err(|_| Error::BadEntityToken(token.to_string()))
}

fn split_indices<'a>(s: &'a str, token: &str, n: usize) -> Result<Vec<u32>, Error> {
    let parts: Vec<&'a str> = s.split('_').collect();
    if parts.len() != n {
        return Err(Error::BadEntityToken(token.to_string()));
    }
    parts.iter().map(|p| parse_u32(p, token)).collect()
}

impl FromStr for EntityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::BadEntityToken(s.to_string());
        let id = if let Some(rest) = s.strip_prefix("PBATT") {
            EntityId::battery(parse_u32(rest, s)?)
        } else if let Some(rest) = s.strip_prefix("PL") {
            let ix = split_indices(rest, s, 2)?;
            EntityId::line(ix[0], ix[1])
        } else if let Some(rest) = s.strip_prefix('P') {
            EntityId::bus(parse_u32(rest, s)?)
        } else if let Some(rest) = s.strip_prefix("C1_") {
            let ix = split_indices(rest, s, 3)?;
            let class = u8::try_from(ix[0]).map_err(|_| bad())?;
            EntityId::SubstationEntity { class, device: ix[1], substation: ix[2] }
        } else if let Some(rest) = s.strip_prefix("C2_") {
            let ix = split_indices(rest, s, 3)?;
            let class = u8::try_from(ix[0]).map_err(|_| bad())?;
            EntityId::SonetEntity { class, a: ix[1], b: ix[2] }
        } else if let Some(rest) = s.strip_prefix("C3_") {
            let ix = split_indices(rest, s, 3)?;
            let class = u8::try_from(ix[0]).map_err(|_| bad())?;
            EntityId::DwdmEntity { class, a: ix[1], b: ix[2] }
        } else if let Some(rest) = s.strip_prefix('L') {
            let ix = split_indices(rest, s, 2)?;
            let class = u8::try_from(ix[0]).map_err(|_| bad())?;
            EntityId::PowerSupplyLine { class, id: ix[1] }
        } else if let Some(rest) = s.strip_prefix('U') {
            EntityId::pmu(parse_u32(rest, s)?)
        } else if let Some(rest) = s.strip_prefix('R') {
            EntityId::rtu(parse_u32(rest, s)?)
        } else {
            return Err(bad());
        };
        id.validate()
    }
}

impl Serialize for EntityId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
