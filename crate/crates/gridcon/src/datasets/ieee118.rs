//! IEEE 118-bus smart grid: 118 buses over 107 substations in 8 zones,
//! 54 SADMs, 31 OADMs, control centers at substations 61 (main) and 16
//! (backup), which also hold the battery backups.

use super::{build_grid, GridSpec, RingSpec, SubSpec};
use crate::network::Network;

/// Standard IEEE 118-bus branch list with parallel circuits collapsed.
const BRANCHES: [(u32, u32); 180] = [
    (1, 2),
    (1, 3),
    (2, 12),
    (3, 5),
    (3, 12),
    (4, 5),
    (4, 11),
    (5, 6),
    (5, 8),
    (5, 11),
    (6, 7),
    (7, 12),
    (8, 9),
    (8, 30),
    (9, 10),
    (11, 12),
    (11, 13),
    (12, 14),
    (12, 16),
    (12, 117),
    (13, 15),
    (14, 15),
    (15, 17),
    (15, 19),
    (15, 33),
    (16, 17),
    (17, 18),
    (17, 30),
    (17, 31),
    (17, 113),
    (18, 19),
    (19, 20),
    (19, 34),
    (20, 21),
    (21, 22),
    (22, 23),
    (23, 24),
    (23, 25),
    (23, 32),
    (24, 70),
    (24, 72),
    (25, 26),
    (25, 27),
    (26, 30),
    (27, 28),
    (27, 32),
    (27, 115),
    (28, 29),
    (29, 31),
    (30, 38),
    (31, 32),
    (32, 113),
    (32, 114),
    (33, 37),
    (34, 36),
    (34, 37),
    (34, 43),
    (35, 36),
    (35, 37),
    (37, 38),
    (37, 39),
    (37, 40),
    (38, 65),
    (39, 40),
    (40, 41),
    (40, 42),
    (41, 42),
    (42, 49),
    (43, 44),
    (44, 45),
    (45, 46),
    (45, 49),
    (46, 47),
    (46, 48),
    (47, 49),
    (47, 69),
    (48, 49),
    (49, 50),
    (49, 51),
    (49, 54),
    (49, 66),
    (49, 69),
    (50, 57),
    (51, 52),
    (51, 58),
    (52, 53),
    (53, 54),
    (54, 55),
    (54, 56),
    (54, 59),
    (55, 56),
    (55, 59),
    (56, 57),
    (56, 58),
    (56, 59),
    (59, 60),
    (59, 61),
    (59, 63),
    (60, 61),
    (60, 62),
    (61, 62),
    (61, 64),
    (62, 66),
    (62, 67),
    (63, 64),
    (64, 65),
    (65, 66),
    (65, 68),
    (66, 67),
    (68, 69),
    (68, 81),
    (68, 116),
    (69, 70),
    (69, 75),
    (69, 77),
    (70, 71),
    (70, 74),
    (70, 75),
    (71, 72),
    (71, 73),
    (74, 75),
    (75, 77),
    (75, 118),
    (76, 77),
    (76, 118),
    (77, 78),
    (77, 80),
    (77, 82),
    (78, 79),
    (79, 80),
    (80, 81),
    (80, 96),
    (80, 97),
    (80, 98),
    (80, 99),
    (82, 83),
    (82, 96),
    (83, 84),
    (83, 85),
    (84, 85),
    (85, 86),
    (85, 88),
    (85, 89),
    (86, 87),
    (88, 89),
    (89, 90),
    (89, 92),
    (90, 91),
    (91, 92),
    (92, 93),
    (92, 94),
    (92, 100),
    (92, 102),
    (93, 94),
    (94, 95),
    (94, 96),
    (94, 100),
    (95, 96),
    (96, 97),
    (98, 100),
    (99, 100),
    (100, 101),
    (100, 103),
    (100, 104),
    (100, 106),
    (101, 102),
    (103, 104),
    (103, 105),
    (103, 110),
    (104, 105),
    (105, 106),
    (105, 107),
    (105, 108),
    (106, 107),
    (108, 109),
    (109, 110),
    (110, 111),
    (110, 112),
    (114, 115),
    (12, 15),
];

/// Substation division of the 118-bus grid: substation id -> member buses.
const SUBSTATION_BUSES: [(u32, &[u32]); 107] = [
    (1, &[1]),
    (2, &[2]),
    (3, &[3]),
    (4, &[4]),
    (5, &[5, 8]),
    (6, &[6]),
    (7, &[7]),
    (8, &[9]),
    (9, &[10]),
    (10, &[11]),
    (11, &[12]),
    (12, &[13]),
    (13, &[14]),
    (14, &[15]),
    (15, &[16]),
    (16, &[17, 30]),
    (17, &[18]),
    (18, &[19]),
    (19, &[20]),
    (20, &[21]),
    (21, &[22]),
    (22, &[23]),
    (23, &[24]),
    (24, &[25, 26]),
    (25, &[27]),
    (26, &[28]),
    (27, &[29]),
    (28, &[31]),
    (29, &[32]),
    (30, &[33]),
    (31, &[34]),
    (32, &[35]),
    (33, &[36]),
    (34, &[37, 38]),
    (35, &[39]),
    (36, &[40]),
    (37, &[41]),
    (38, &[42]),
    (39, &[43]),
    (40, &[44]),
    (41, &[45]),
    (42, &[46]),
    (43, &[47]),
    (44, &[48]),
    (45, &[49]),
    (46, &[50]),
    (47, &[51]),
    (48, &[52]),
    (49, &[53]),
    (50, &[54]),
    (51, &[55]),
    (52, &[56]),
    (53, &[57]),
    (54, &[58]),
    (55, &[59, 63]),
    (56, &[60]),
    (57, &[61, 64]),
    (58, &[62]),
    (59, &[65, 66]),
    (60, &[67]),
    (61, &[68, 69, 116]),
    (62, &[70]),
    (63, &[71]),
    (64, &[72]),
    (65, &[73]),
    (66, &[74]),
    (67, &[75]),
    (68, &[76]),
    (69, &[77]),
    (70, &[78]),
    (71, &[79]),
    (72, &[80, 81]),
    (73, &[82]),
    (74, &[83]),
    (75, &[84]),
    (76, &[85]),
    (77, &[86, 87]),
    (78, &[88]),
    (79, &[89]),
    (80, &[90]),
    (81, &[91]),
    (82, &[92]),
    (83, &[93]),
    (84, &[94]),
    (85, &[95]),
    (86, &[96]),
    (87, &[97]),
    (88, &[98]),
    (89, &[99]),
    (90, &[100]),
    (91, &[101]),
    (92, &[102]),
    (93, &[103]),
    (94, &[104]),
    (95, &[105]),
    (96, &[106]),
    (97, &[107]),
    (98, &[108]),
    (99, &[109]),
    (100, &[110]),
    (101, &[111]),
    (102, &[112]),
    (103, &[113]),
    (104, &[114]),
    (105, &[115]),
    (106, &[117]),
    (107, &[118]),
];

/// Standard generator buses of the 118-bus test system.
const GENERATORS: [u32; 54] = [
    1, 4, 6, 8, 10, 12, 15, 18, 19, 24, 25, 26, 27, 31, 32, 34, 36, 40, 42, 46, 49, 54, 55, 56,
    59, 61, 62, 65, 66, 69, 70, 72, 73, 74, 76, 77, 80, 85, 87, 89, 90, 91, 92, 99, 100, 103,
    104, 105, 107, 110, 111, 112, 113, 116,
];

/// A common optimal-PMU-placement solution for the 118-bus system.
const PMU_BUSES: [u32; 32] = [
    3, 5, 9, 12, 15, 17, 21, 23, 28, 30, 34, 37, 40, 45, 49, 52, 56, 62, 64, 68, 71, 75, 77, 80,
    85, 86, 90, 94, 101, 105, 110, 114,
];

pub fn build_ieee118() -> Network {
    let zone_of = |sub: u32| ((sub - 1) * 8 / 107) + 1;
    let substations: Vec<SubSpec> = SUBSTATION_BUSES
        .iter()
        .map(|(id, buses)| SubSpec {
            id: *id,
            buses: buses.to_vec(),
            feeds: buses.to_vec(),
            zone: zone_of(*id),
            battery: *id == 16 || *id == 61,
        })
        .collect();

    // SADMs are homed at substations 1..=54, OADMs at 55..=85; the
    // remaining 22 substations attach through foreign drop fibers,
    // alternating between the two rings.
    let sadms: Vec<RingSpec> = (1..=54).map(|i| RingSpec { id: i, home: i }).collect();
    let oadms: Vec<RingSpec> = (1..=31).map(|i| RingSpec { id: i, home: 54 + i }).collect();
    let foreign_fibers: Vec<(bool, u32, u32)> = (86..=107)
        .map(|sub| {
            let k = sub - 86;
            if k % 2 == 0 {
                (true, (k / 2) % 54 + 1, sub)
            } else {
                (false, (k / 2) % 31 + 1, sub)
            }
        })
        .collect();

    let spec = GridSpec {
        branches: BRANCHES.to_vec(),
        substations,
        sadms,
        oadms,
        foreign_fibers,
        generators: GENERATORS.to_vec(),
        pmu_buses: PMU_BUSES.to_vec(),
        control_centers: vec![16, 61],
    };
    build_grid(&spec).expect("the bundled 118-bus dataset is well formed")
}
