// SPDX-License-Identifier: Apache-2.0

//! Wafer dataset schema: wafer → die → sub-die → devices and measurements.
//!
//! One JSON document per wafer; field names follow the struct fields
//! (snake_case). JJ resistance bulk data can also be ingested from CSV with
//! the header
//! `device_id,die_col,die_row,cd_design_be,cd_design_te,r_n_ohm,measured_at_hours`.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const DIE_PITCH_X_MM: f64 = 24.0;
pub const DIE_PITCH_Y_MM: f64 = 28.0;
pub const WAFER_RADIUS_MM: f64 = 150.0;

const RADIUS_TOLERANCE_MM: f64 = 1e-3;

/// Die grid label `(col,row)`, `(0,0)` at the wafer center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPosition(pub i32, pub i32);

impl GridPosition {
    pub fn col(self) -> i32 {
        self.0
    }

    pub fn row(self) -> i32 {
        self.1
    }

    /// Die center in mm.
    pub fn center_mm(self) -> (f64, f64) {
        (
            f64::from(self.0) * DIE_PITCH_X_MM,
            f64::from(self.1) * DIE_PITCH_Y_MM,
        )
    }

    pub fn center_radius(self) -> f64 {
        let (x, y) = self.center_mm();
        x.hypot(y)
    }

    /// Compact form used inside device ids, e.g. `c-1r2`.
    pub fn tag(self) -> String {
        format!("c{}r{}", self.0, self.1)
    }
}

impl fmt::Display for GridPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaferDataset {
    pub wafer_id: String,
    pub batch_id: String,
    pub fabrication_date: NaiveDate,
    pub dies: Vec<DieRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieRecord {
    pub grid_position: GridPosition,
    /// mm from the wafer center.
    pub center_radius: f64,
    pub subdies: Vec<SubDieRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubDieRecord {
    pub name: String,
    #[serde(default)]
    pub qubits: Vec<QubitDevice>,
    #[serde(default)]
    pub jj_structures: Vec<JJTestStructure>,
    #[serde(default)]
    pub measurements: Vec<MeasurementRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitDevice {
    pub device_id: String,
    pub design: QubitDesign,
}

/// One row of the qubit design table. Units: μm, nm, GHz except `e_c` and `g`
/// in MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitDesign {
    pub name: String,
    pub cap_width: f64,
    pub cap_gap: f64,
    pub cd_design: f64,
    pub f_r: f64,
    pub f_qb_target: f64,
    pub e_c: f64,
    pub e_j_target: f64,
    pub g: f64,
    pub has_squid: bool,
}

/// A junction test structure. `copies` is the number of nominally identical
/// junctions wired in parallel inside the structure; the single-junction
/// resistance is `(r_n - r_contact) * copies`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JJTestStructure {
    pub device_id: String,
    pub cd_design_be: f64,
    pub cd_design_te: f64,
    #[serde(default = "default_copies")]
    pub copies: u32,
    #[serde(default = "default_r_contact")]
    pub r_contact: f64,
}

fn default_copies() -> u32 {
    1
}

pub fn default_r_contact() -> f64 {
    32.0
}

impl JJTestStructure {
    pub fn new(device_id: impl Into<String>, cd_be: f64, cd_te: f64) -> Self {
        Self {
            device_id: device_id.into(),
            cd_design_be: cd_be,
            cd_design_te: cd_te,
            copies: 1,
            r_contact: default_r_contact(),
        }
    }

    /// Junction resistance with the probe contact removed.
    pub fn junction_resistance(&self, r_n_measured: f64) -> f64 {
        (r_n_measured - self.r_contact) * f64::from(self.copies)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    /// Ω
    NormalResistance,
    /// GHz
    QubitFrequency,
    /// μs
    T1,
    /// μs
    T2Echo,
    PopulationMap,
}

impl MeasurementKind {
    pub fn is_scalar(self) -> bool {
        !matches!(self, MeasurementKind::PopulationMap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementValue {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

impl MeasurementValue {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            MeasurementValue::Scalar(v) => Some(*v),
            MeasurementValue::Matrix(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub device_id: String,
    pub kind: MeasurementKind,
    pub value: MeasurementValue,
    /// Hours since fabrication.
    pub measured_at: f64,
}

impl MeasurementRecord {
    pub fn scalar(device_id: impl Into<String>, kind: MeasurementKind, value: f64, at: f64) -> Self {
        Self {
            device_id: device_id.into(),
            kind,
            value: MeasurementValue::Scalar(value),
            measured_at: at,
        }
    }

    /// A usable scalar reading: right kind, finite and positive.
    pub fn valid_scalar(&self) -> Option<f64> {
        self.value
            .scalar()
            .filter(|v| self.kind.is_scalar() && v.is_finite() && *v > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    DuplicateGridPosition,
    DuplicateDeviceId,
    RadiusOutOfRange,
    RadiusInconsistent,
    DesignNonPositive,
    TransmonRegime,
    JunctionGeometry,
    ContactResistance,
    NonPositiveValue,
    PopulationRange,
    ValueShape,
    UnknownDevice,
    NegativeTime,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    /// Device id, or the die label for die-level rules.
    pub device_id: String,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.device_id, self.rule, self.message)
    }
}

impl QubitDesign {
    pub fn violations(&self, device_id: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        let positive = [
            ("cap_width", self.cap_width),
            ("cap_gap", self.cap_gap),
            ("cd_design", self.cd_design),
            ("f_r", self.f_r),
            ("f_qb_target", self.f_qb_target),
            ("e_c", self.e_c),
            ("e_j_target", self.e_j_target),
            ("g", self.g),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                out.push(Violation {
                    device_id: device_id.to_string(),
                    rule: Rule::DesignNonPositive,
                    message: format!("design {} field {name} = {v} must be positive", self.name),
                });
            }
        }
        if out.is_empty() && self.e_j_target * 1e3 / self.e_c < 20.0 {
            out.push(Violation {
                device_id: device_id.to_string(),
                rule: Rule::TransmonRegime,
                message: format!(
                    "design {} has E_J/E_C = {:.2} < 20",
                    self.name,
                    self.e_j_target * 1e3 / self.e_c
                ),
            });
        }
        out
    }
}

impl WaferDataset {
    pub fn new(wafer_id: impl Into<String>, batch_id: impl Into<String>, date: NaiveDate) -> Self {
        Self {
            wafer_id: wafer_id.into(),
            batch_id: batch_id.into(),
            fabrication_date: date,
            dies: Vec::new(),
        }
    }

    pub fn die(&self, pos: GridPosition) -> Option<&DieRecord> {
        self.dies.iter().find(|d| d.grid_position == pos)
    }

    pub fn qubits(&self) -> impl Iterator<Item = (&DieRecord, &SubDieRecord, &QubitDevice)> {
        self.dies.iter().flat_map(|d| {
            d.subdies
                .iter()
                .flat_map(move |s| s.qubits.iter().map(move |q| (d, s, q)))
        })
    }

    pub fn jj_structures(
        &self,
    ) -> impl Iterator<Item = (&DieRecord, &SubDieRecord, &JJTestStructure)> {
        self.dies.iter().flat_map(|d| {
            d.subdies
                .iter()
                .flat_map(move |s| s.jj_structures.iter().map(move |j| (d, s, j)))
        })
    }

    pub fn measurements(
        &self,
    ) -> impl Iterator<Item = (&DieRecord, &SubDieRecord, &MeasurementRecord)> {
        self.dies.iter().flat_map(|d| {
            d.subdies
                .iter()
                .flat_map(move |s| s.measurements.iter().map(move |m| (d, s, m)))
        })
    }

    /// Measurements grouped by device id, in stored order.
    pub fn measurements_by_device(
        &self,
        kind: MeasurementKind,
    ) -> BTreeMap<&str, Vec<&MeasurementRecord>> {
        let mut out: BTreeMap<&str, Vec<&MeasurementRecord>> = BTreeMap::new();
        for (_, _, m) in self.measurements().filter(|(_, _, m)| m.kind == kind) {
            out.entry(m.device_id.as_str()).or_default().push(m);
        }
        out
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits().count()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

/// Checks every schema invariant. The result is sorted, so it does not depend
/// on die or device order.
pub fn validate_dataset(ds: &WaferDataset) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut positions = BTreeMap::new();
    for die in &ds.dies {
        *positions.entry(die.grid_position).or_insert(0usize) += 1;
    }
    for (pos, n) in positions {
        if n > 1 {
            out.push(Violation {
                device_id: pos.to_string(),
                rule: Rule::DuplicateGridPosition,
                message: format!("grid position {pos} appears {n} times"),
            });
        }
    }

    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    for die in &ds.dies {
        let label = die.grid_position.to_string();
        if !(die.center_radius.is_finite() && (0.0..=WAFER_RADIUS_MM).contains(&die.center_radius)) {
            out.push(Violation {
                device_id: label.clone(),
                rule: Rule::RadiusOutOfRange,
                message: format!("center_radius {} mm outside [0, 150]", die.center_radius),
            });
        }
        let expected = die.grid_position.center_radius();
        if !((die.center_radius - expected).abs() <= RADIUS_TOLERANCE_MM) {
            out.push(Violation {
                device_id: label.clone(),
                rule: Rule::RadiusInconsistent,
                message: format!(
                    "center_radius {} mm, grid position implies {expected:.3} mm",
                    die.center_radius
                ),
            });
        }

        for sub in &die.subdies {
            let mut known: BTreeSet<&str> = BTreeSet::new();
            for q in &sub.qubits {
                *ids.entry(q.device_id.as_str()).or_insert(0) += 1;
                known.insert(q.device_id.as_str());
                out.extend(q.design.violations(&q.device_id));
            }
            for jj in &sub.jj_structures {
                *ids.entry(jj.device_id.as_str()).or_insert(0) += 1;
                known.insert(jj.device_id.as_str());
                if !(jj.cd_design_be > 0.0 && jj.cd_design_te > 0.0) || jj.copies == 0 {
                    out.push(Violation {
                        device_id: jj.device_id.clone(),
                        rule: Rule::JunctionGeometry,
                        message: "critical dimensions and copies must be positive".into(),
                    });
                }
                if !(jj.r_contact >= 0.0) {
                    out.push(Violation {
                        device_id: jj.device_id.clone(),
                        rule: Rule::ContactResistance,
                        message: format!("r_contact {} must be >= 0", jj.r_contact),
                    });
                }
            }
            for m in &sub.measurements {
                out.extend(measurement_violations(m, &known));
            }
        }
    }

    for (id, n) in ids {
        if n > 1 {
            out.push(Violation {
                device_id: id.to_string(),
                rule: Rule::DuplicateDeviceId,
                message: format!("device id used {n} times"),
            });
        }
    }

    out.sort();
    out
}

fn measurement_violations(m: &MeasurementRecord, known: &BTreeSet<&str>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |rule, message: String| {
        out.push(Violation {
            device_id: m.device_id.clone(),
            rule,
            message,
        })
    };
    if !known.contains(m.device_id.as_str()) {
        push(Rule::UnknownDevice, "measurement refers to no device in its sub-die".into());
    }
    if !(m.measured_at.is_finite() && m.measured_at >= 0.0) {
        push(Rule::NegativeTime, format!("measured_at {} h", m.measured_at));
    }
    match (&m.value, m.kind.is_scalar()) {
        (MeasurementValue::Scalar(v), true) => {
            if !(v.is_finite() && *v > 0.0) {
                push(Rule::NonPositiveValue, format!("{:?} value {v} must be positive", m.kind));
            }
        }
        (MeasurementValue::Matrix(rows), false) => {
            let width = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != width) {
                push(Rule::ValueShape, "population map rows differ in length".into());
            }
            if rows.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
                push(Rule::PopulationRange, "population values must lie in [0,1]".into());
            }
        }
        _ => push(Rule::ValueShape, format!("value shape does not match kind {:?}", m.kind)),
    }
    out
}

/// Per-qubit functional status: functional means at least one valid
/// frequency record.
pub fn qubit_functional_status(ds: &WaferDataset) -> BTreeMap<&str, bool> {
    let freqs = ds.measurements_by_device(MeasurementKind::QubitFrequency);
    ds.qubits()
        .map(|(_, _, q)| {
            let ok = freqs
                .get(q.device_id.as_str())
                .is_some_and(|ms| ms.iter().any(|m| m.valid_scalar().is_some()));
            (q.device_id.as_str(), ok)
        })
        .collect()
}

pub fn functional_yield(ds: &WaferDataset) -> Result<f64> {
    let status = qubit_functional_status(ds);
    if status.is_empty() {
        return Err(Error::NoQubits);
    }
    let ok = status.values().filter(|&&f| f).count();
    Ok(ok as f64 / status.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct JjCsvRow {
    device_id: String,
    die_col: i32,
    die_row: i32,
    cd_design_be: f64,
    cd_design_te: f64,
    r_n_ohm: f64,
    measured_at_hours: f64,
}

/// Name of the sub-die holding ingested JJ test structures.
pub const JJ_SUBDIE: &str = "JJ";

/// Builds a dataset from JJ resistance CSV rows. Repeated `device_id`s are
/// re-measurements of the same structure.
pub fn ingest_jj_csv<R: Read>(
    reader: R,
    wafer_id: &str,
    batch_id: &str,
    fabrication_date: NaiveDate,
) -> Result<WaferDataset> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut dies: BTreeMap<GridPosition, SubDieRecord> = BTreeMap::new();
    let mut seen: BTreeMap<String, (GridPosition, f64, f64)> = BTreeMap::new();

    for row in rdr.deserialize() {
        let row: JjCsvRow = row?;
        let pos = GridPosition(row.die_col, row.die_row);
        let sub = dies.entry(pos).or_insert_with(|| SubDieRecord {
            name: JJ_SUBDIE.to_string(),
            qubits: Vec::new(),
            jj_structures: Vec::new(),
            measurements: Vec::new(),
        });
        match seen.get(&row.device_id) {
            Some(&(p, be, te)) => {
                if p != pos || be != row.cd_design_be || te != row.cd_design_te {
                    return Err(Error::Invalid(format!(
                        "device {} reappears with different die or geometry",
                        row.device_id
                    )));
                }
            }
            None => {
                seen.insert(row.device_id.clone(), (pos, row.cd_design_be, row.cd_design_te));
                sub.jj_structures.push(JJTestStructure::new(
                    row.device_id.clone(),
                    row.cd_design_be,
                    row.cd_design_te,
                ));
            }
        }
        sub.measurements.push(MeasurementRecord::scalar(
            row.device_id,
            MeasurementKind::NormalResistance,
            row.r_n_ohm,
            row.measured_at_hours,
        ));
    }

    let mut ds = WaferDataset::new(wafer_id, batch_id, fabrication_date);
    ds.dies = dies
        .into_iter()
        .map(|(pos, sub)| DieRecord {
            grid_position: pos,
            center_radius: pos.center_radius(),
            subdies: vec![sub],
        })
        .collect();
    Ok(ds)
}

/// Writes every JJ resistance record in the ingest CSV layout.
pub fn export_jj_csv<W: Write>(ds: &WaferDataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for die in &ds.dies {
        for sub in &die.subdies {
            let geometry: BTreeMap<&str, &JJTestStructure> = sub
                .jj_structures
                .iter()
                .map(|j| (j.device_id.as_str(), j))
                .collect();
            for m in &sub.measurements {
                let (Some(jj), Some(r)) = (geometry.get(m.device_id.as_str()), m.value.scalar())
                else {
                    continue;
                };
                if m.kind != MeasurementKind::NormalResistance {
                    continue;
                }
                wtr.serialize(JjCsvRow {
                    device_id: m.device_id.clone(),
                    die_col: die.grid_position.col(),
                    die_row: die.grid_position.row(),
                    cd_design_be: jj.cd_design_be,
                    cd_design_te: jj.cd_design_te,
                    r_n_ohm: r,
                    measured_at_hours: m.measured_at,
                })?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}
