// SPDX-License-Identifier: Apache-2.0

//! Built-in qubit design table for sub-dies D1 (i1-i5) and D2 (x1-x10).

use crate::dataset::QubitDesign;

// name, width um, gap um, cd nm, f_r GHz, f_qb GHz, E_C MHz, E_J GHz, g MHz, squid
const TABLE_I: [(&str, f64, f64, f64, f64, f64, f64, f64, f64, bool); 15] = [
    ("i1", 13.0, 13.0, 120.0, 7.2, 3.94, 203.0, 10.56, 77.7, false),
    ("i2", 90.0, 90.0, 90.0, 6.3, 2.90, 202.0, 5.94, 55.0, false),
    ("i3", 48.0, 48.0, 100.0, 6.6, 3.27, 206.0, 7.33, 68.8, false),
    ("i4", 24.0, 24.0, 110.0, 6.9, 3.59, 203.0, 8.87, 68.0, false),
    ("i5", 90.0, 90.0, 110.0, 7.5, 5.15, 202.0, 17.75, 85.6, true),
    ("x1", 20.0, 13.0, 119.0, 6.0, 3.08, 231.0, 5.94, 52.5, false),
    ("x2", 20.0, 13.0, 131.0, 6.2, 3.45, 231.0, 7.33, 57.1, false),
    ("x3", 20.0, 13.0, 143.0, 6.4, 3.82, 231.0, 8.87, 61.8, false),
    ("x4", 20.0, 13.0, 156.0, 6.6, 4.19, 231.0, 10.56, 66.5, false),
    ("x5", 20.0, 13.0, 168.0, 6.8, 4.48, 231.0, 12.02, 70.7, false),
    ("x6", 20.0, 13.0, 180.0, 7.0, 4.74, 231.0, 13.37, 74.7, false),
    ("x7", 20.0, 13.0, 191.0, 7.2, 5.11, 231.0, 15.42, 79.6, false),
    ("x8", 20.0, 13.0, 205.0, 7.4, 5.47, 231.0, 17.62, 84.5, false),
    ("x9", 20.0, 13.0, 220.0, 7.6, 5.77, 231.0, 19.48, 88.9, false),
    ("x10", 20.0, 13.0, 165.0, 7.8, 6.07, 231.0, 21.47, 93.4, true),
];

/// Default designed critical dimensions (nm) of the twelve JJ test-structure
/// areas. Bottom and top electrode share the same designed cd.
pub const JJ_TEST_CDS: [f64; 12] = [
    100.0, 110.0, 120.0, 135.0, 150.0, 165.0, 180.0, 200.0, 220.0, 245.0, 270.0, 300.0,
];

pub fn table_i() -> Vec<QubitDesign> {
    TABLE_I
        .iter()
        .map(
            |&(name, cap_width, cap_gap, cd_design, f_r, f_qb_target, e_c, e_j_target, g, has_squid)| {
                QubitDesign {
                    name: name.to_string(),
                    cap_width,
                    cap_gap,
                    cd_design,
                    f_r,
                    f_qb_target,
                    e_c,
                    e_j_target,
                    g,
                    has_squid,
                }
            },
        )
        .collect()
}

pub fn design(name: &str) -> Option<QubitDesign> {
    table_i().into_iter().find(|d| d.name == name)
}

/// Sub-die D1: five qubits with four capacitor geometries.
pub fn d1_designs() -> Vec<QubitDesign> {
    table_i()
        .into_iter()
        .filter(|d| d.name.starts_with('i'))
        .collect()
}

/// Sub-die D2: identical capacitors, ten junction sizes (x10 is flux tunable).
pub fn d2_designs() -> Vec<QubitDesign> {
    table_i()
        .into_iter()
        .filter(|d| d.name.starts_with('x'))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_fifteen_rows_in_transmon_regime() {
        let t = table_i();
        assert_eq!(t.len(), 15);
        for d in &t {
            assert!(d.e_j_target * 1e3 / d.e_c >= 20.0, "{}", d.name);
        }
        assert_eq!(d1_designs().len(), 5);
        assert_eq!(d2_designs().len(), 10);
        assert_eq!(t.iter().filter(|d| d.has_squid).count(), 2);
    }
}
