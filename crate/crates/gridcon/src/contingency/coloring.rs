//! Vertex coloring used by the contingency heuristic. Yellow marks
//! generator buses, blue marks PMU-equipped buses, green marks buses that
//! are both; pink, red, and grey are transient search markings on the
//! power subgraph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::entity::EntityId;
use crate::network::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Yellow,
    Blue,
    Green,
    Pink,
    Red,
    Grey,
}

#[derive(Debug, Clone, Default)]
pub struct ColoringState {
    pub color: BTreeMap<EntityId, Color>,
}

impl ColoringState {
    pub fn get(&self, e: EntityId) -> Color {
        self.color.get(&e).copied().unwrap_or(Color::White)
    }

    pub fn set(&mut self, e: EntityId, c: Color) {
        self.color.insert(e, c);
    }

    pub fn entities_with(&self, c: Color) -> Vec<EntityId> {
        self.color.iter().filter(|(_, v)| **v == c).map(|(e, _)| *e).collect()
    }

    pub fn has_any(&self, c: Color) -> bool {
        self.color.values().any(|v| *v == c)
    }
}

/// Base coloring over the operational, non-hardened buses: yellow for
/// generators, blue for PMU buses, green for both, white otherwise.
pub fn color_base(net: &Network) -> ColoringState {
    let mut coloring = ColoringState::default();
    for bus in net.buses() {
        if net.is_hardened(bus) || !net.state_of(bus).map(|s| s.is_operational()).unwrap_or(false) {
            continue;
        }
        let yellow = net.annotations.generators.contains(&bus);
        let blue = net.annotations.pmu_buses.contains(&bus);
        let color = match (yellow, blue) {
            (true, true) => Color::Green,
            (true, false) => Color::Yellow,
            (false, true) => Color::Blue,
            (false, false) => Color::White,
        };
        coloring.set(bus, color);
    }
    coloring
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::build_ieee14;

    #[test]
    fn base_colors_follow_annotations() {
        let net = build_ieee14();
        let c = color_base(&net);
        // P1 generates but has no PMU; P7 has a PMU but no generator;
        // P2 and P6 have both.
        assert_eq!(c.get("P1".parse().unwrap()), Color::Yellow);
        assert_eq!(c.get("P7".parse().unwrap()), Color::Blue);
        assert_eq!(c.get("P2".parse().unwrap()), Color::Green);
        assert_eq!(c.get("P6".parse().unwrap()), Color::Green);
        assert_eq!(c.get("P4".parse().unwrap()), Color::White);
        // Only buses carry colors.
        assert!(c.color.keys().all(|e| e.is_bus()));
    }
}
