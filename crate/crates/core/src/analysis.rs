// SPDX-License-Identifier: Apache-2.0

//! Dataset-level groupings feeding the estimators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{GridPosition, MeasurementKind, WaferDataset};
use crate::error::{Error, Result};
use crate::geometry::{estimate_area, CdCalibration};
use crate::transmon::rsd;

/// Junction resistances (contact removed) of the test structures sharing one
/// designed geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaGroup {
    pub cd_be: f64,
    pub cd_te: f64,
    /// μm²
    pub area: f64,
    pub resistances: Vec<f64>,
}

impl AreaGroup {
    /// Percent spread of the junction conductance `1/R`. To first order this
    /// is the resistance RSD; unlike it, it is linear in the junction area,
    /// so area scatter of 10–20 % does not inflate it.
    pub fn conductance_rsd(&self) -> Option<f64> {
        let g: Vec<f64> = self.resistances.iter().map(|r| 1.0 / r).collect();
        rsd(&g).map(|v| 100.0 * v)
    }

    pub fn resistance_rsd(&self) -> Option<f64> {
        rsd(&self.resistances).map(|v| 100.0 * v)
    }
}

/// Groups the first valid resistance of every JJ structure by designed cds,
/// optionally on one die only. Groups are ordered by area.
pub fn jj_area_groups(ds: &WaferDataset, cal: &CdCalibration, die: Option<GridPosition>) -> Result<Vec<AreaGroup>> {
    let rn = ds.measurements_by_device(MeasurementKind::NormalResistance);
    let mut groups: BTreeMap<(u64, u64), AreaGroup> = BTreeMap::new();
    for (d, _, s) in ds.jj_structures() {
        if die.is_some_and(|p| p != d.grid_position) {
            continue;
        }
        let Some(v) = rn.get(s.device_id.as_str()).and_then(|ms| ms.iter().find_map(|m| m.valid_scalar())) else {
            continue;
        };
        let r = s.junction_resistance(v);
        if !(r > 0.0) {
            continue;
        }
        let key = (s.cd_design_be.to_bits(), s.cd_design_te.to_bits());
        let g = match groups.entry(key) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => e.insert(AreaGroup {
                cd_be: s.cd_design_be,
                cd_te: s.cd_design_te,
                area: estimate_area(s.cd_design_be, s.cd_design_te, cal)?,
                resistances: Vec::new(),
            }),
        };
        g.resistances.push(r);
    }
    if groups.is_empty() {
        return Err(Error::insufficient("no JJ test structures with valid resistances"));
    }
    let mut out: Vec<AreaGroup> = groups.into_values().collect();
    out.sort_by(|a, b| a.area.total_cmp(&b.area));
    Ok(out)
}

/// `(area, conductance RSD %)` for groups of at least `min_n` junctions.
pub fn rsd_points(groups: &[AreaGroup], min_n: usize) -> Vec<(f64, f64)> {
    groups
        .iter()
        .filter(|g| g.resistances.len() >= min_n.max(2))
        .filter_map(|g| g.conductance_rsd().map(|r| (g.area, r)))
        .collect()
}
