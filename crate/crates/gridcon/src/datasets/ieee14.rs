//! IEEE 14-bus smart grid: 14 buses over 11 substations, 34 communication
//! terminals (11 servers, 11 gateways, 7 SADMs, 5 OADMs), 48 IDR-bearing
//! entities. Substation 6 holds bus P12 and the only battery backup, and
//! hosts both the SADM-1 and OADM-1 drops.

use super::{build_grid, GridSpec, RingSpec, SubSpec};
use crate::network::Network;

/// Standard IEEE 14-bus branch list; bus 8 connects only to bus 7.
const BRANCHES: [(u32, u32); 20] = [
    (1, 2),
    (1, 5),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 4),
    (4, 5),
    (4, 7),
    (4, 9),
    (5, 6),
    (6, 11),
    (6, 12),
    (6, 13),
    (7, 8),
    (7, 9),
    (9, 10),
    (9, 14),
    (10, 11),
    (12, 13),
    (13, 14),
];

pub fn build_ieee14() -> Network {
    // Single-bus substations carry a designated backup feeder bus so a lone
    // bus outage cannot black out its own station supply; substation 6 runs
    // on battery backup instead and is the one single-fed station.
    let sub = |id: u32, buses: &[u32], feeds: &[u32], battery: bool| SubSpec {
        id,
        buses: buses.to_vec(),
        feeds: feeds.to_vec(),
        zone: 1,
        battery,
    };
    let spec = GridSpec {
        branches: BRANCHES.to_vec(),
        substations: vec![
            sub(1, &[1], &[1, 5], false),
            sub(2, &[2], &[2, 4], false),
            sub(3, &[3], &[3, 5], false),
            sub(4, &[4, 9], &[4, 9], false),
            sub(5, &[5, 6], &[5, 6], false),
            sub(6, &[12], &[12], true),
            sub(7, &[7, 8], &[7, 8], false),
            sub(8, &[10], &[10, 9], false),
            sub(9, &[11], &[11, 6], false),
            sub(10, &[13], &[13, 14], false),
            sub(11, &[14], &[14, 10], false),
        ],
        sadms: vec![
            RingSpec { id: 1, home: 6 },
            RingSpec { id: 2, home: 1 },
            RingSpec { id: 3, home: 2 },
            RingSpec { id: 4, home: 3 },
            RingSpec { id: 5, home: 4 },
            RingSpec { id: 6, home: 5 },
            RingSpec { id: 7, home: 7 },
        ],
        oadms: vec![
            RingSpec { id: 1, home: 6 },
            RingSpec { id: 2, home: 8 },
            RingSpec { id: 3, home: 9 },
            RingSpec { id: 4, home: 10 },
            RingSpec { id: 5, home: 11 },
        ],
        foreign_fibers: vec![],
        generators: vec![1, 2, 3, 6, 8],
        pmu_buses: vec![2, 6, 7, 9],
        control_centers: vec![1],
    };
    build_grid(&spec).expect("the bundled 14-bus dataset is well formed")
}
