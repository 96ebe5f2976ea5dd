// SPDX-License-Identifier: Apache-2.0

//! Seeded Monte Carlo fabrication model producing datasets with known
//! ground truth.

mod bath;

pub use bath::{simulate_swap_map, simulate_t1_series, SwapMapSpec, T1Series, TlsBathConfig, TlsDefect};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::dataset::{
    DieRecord, GridPosition, JJTestStructure, MeasurementKind, MeasurementRecord, QubitDesign, QubitDevice,
    SubDieRecord, WaferDataset, DIE_PITCH_X_MM, DIE_PITCH_Y_MM, JJ_SUBDIE, WAFER_RADIUS_MM,
};
use crate::designs;
use crate::epr::{participation, InterfaceStack};
use crate::error::{Error, Result};
use crate::geometry::{estimate_area, CdCalibration};
use crate::transmon::{ej_from_rn, fqb_from_energies};
use crate::units::{Ghz, Mhz};

/// Radius inside which a die's whole footprint must lie, mm.
pub const USABLE_RADIUS_MM: f64 = 145.0;
const MAX_RESAMPLES: usize = 100;

/// Dies whose full footprint fits inside [`USABLE_RADIUS_MM`], sorted by
/// `(row, col)`: 75 on a 300 mm wafer.
pub fn standard_die_layout() -> Vec<GridPosition> {
    let mut out = Vec::new();
    for row in -6..=6 {
        for col in -7..=7 {
            let (x, y) = GridPosition(col, row).center_mm();
            let corner = (x.abs() + 0.5 * DIE_PITCH_X_MM).hypot(y.abs() + 0.5 * DIE_PITCH_Y_MM);
            if corner <= USABLE_RADIUS_MM {
                out.push(GridPosition(col, row));
            }
        }
    }
    out
}

/// RA product (Ω·μm²) versus radius (mm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RaProfile {
    /// `center·(1 + curvature·(r/150)²)`
    Quadratic { center: f64, curvature: f64 },
    /// Linear interpolation, held beyond the ends.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

impl Default for RaProfile {
    fn default() -> Self {
        RaProfile::Quadratic { center: 300.0, curvature: -0.2 }
    }
}

impl RaProfile {
    pub fn flat(value: f64) -> Self {
        RaProfile::Quadratic { center: value, curvature: 0.0 }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RaProfile::Quadratic { center, curvature } => center * (1.0 + curvature * (r / WAFER_RADIUS_MM).powi(2)),
            RaProfile::Tabulated { radii, values } => {
                let k = radii.partition_point(|&x| x <= r);
                if k == 0 {
                    values[0]
                } else if k == radii.len() {
                    values[k - 1]
                } else {
                    let (x0, x1, y0, y1) = (radii[k - 1], radii[k], values[k - 1], values[k]);
                    y0 + (y1 - y0) * (r - x0) / (x1 - x0)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            RaProfile::Quadratic { center, curvature } => {
                *center > 0.0 && center.is_finite() && curvature.is_finite() && 1.0 + curvature > 0.0
            }
            RaProfile::Tabulated { radii, values } => {
                !radii.is_empty()
                    && radii.len() == values.len()
                    && radii.windows(2).all(|w| w[1] > w[0])
                    && values.iter().all(|v| *v > 0.0 && v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config("RA profile must be positive over the wafer".into()))
        }
    }
}

/// Planted mean-T1 model: `1/Q = δ₀ + δ_t·(1 + radial·(r/150)²)·p_total`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub delta_0: f64,
    pub delta_t: f64,
    pub radial: f64,
    /// Relative Gaussian scatter of individual T1 readings.
    pub t1_scatter: f64,
    pub t1_repeats: usize,
    #[serde(default)]
    pub stack: InterfaceStack,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self { delta_0: 1.77e-7, delta_t: 2.9e-3, radial: 2.5, t1_scatter: 0.1, t1_repeats: 3, stack: InterfaceStack::default() }
    }
}

/// A T1 time series attached to one D1 qubit (the most central one of the
/// given design).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T1SeriesSpec {
    pub design: String,
    pub duration_h: f64,
    pub interval_min: f64,
}

impl Default for T1SeriesSpec {
    fn default() -> Self {
        Self { design: "i2".into(), duration_h: 60.0, interval_min: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub seed: u64,
    pub wafer_id: String,
    pub batch_id: String,
    pub fabrication_date: NaiveDate,
    /// `None`: [`standard_die_layout`].
    pub dies: Option<Vec<GridPosition>>,
    pub ra_profile: RaProfile,
    /// Within-die RA spread, percent.
    pub rsd_ra_local: f64,
    /// μm²
    pub sigma_area: f64,
    pub cd_offsets: CdCalibration,
    /// Ω
    pub r_contact: f64,
    /// Relative RA drift per day.
    pub aging_per_day: f64,
    pub t1_model: TlsBathConfig,
    pub loss: LossConfig,
    pub yield_loss_prob: f64,
    /// Hours after fabrication of the first measurement.
    pub measured_at_h: f64,
    pub t1_series: Option<T1SeriesSpec>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            wafer_id: "SIM-W01".into(),
            batch_id: "SIM-B01".into(),
            fabrication_date: NaiveDate::from_ymd_opt(2024, 1, 15).expect("valid date"),
            dies: None,
            ra_profile: RaProfile::default(),
            rsd_ra_local: 4.47,
            sigma_area: 0.00334,
            cd_offsets: CdCalibration::default(),
            r_contact: 32.0,
            aging_per_day: -0.037 / 146.0,
            t1_model: TlsBathConfig::fluctuating(),
            loss: LossConfig::default(),
            yield_loss_prob: 0.015,
            measured_at_h: 120.0,
            t1_series: Some(T1SeriesSpec::default()),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0..=1.0).contains(&self.yield_loss_prob) {
            return bad(format!("yield_loss_prob {} outside [0, 1]", self.yield_loss_prob));
        }
        if !(self.rsd_ra_local >= 0.0 && self.sigma_area >= 0.0) {
            return bad("rsd_ra_local and sigma_area must be nonnegative".into());
        }
        if !(self.r_contact >= 0.0) || !self.aging_per_day.is_finite() || !(self.measured_at_h >= 0.0) {
            return bad("r_contact and measured_at_h must be nonnegative, aging finite".into());
        }
        if !self.cd_offsets.is_valid() {
            return bad("invalid cd calibration".into());
        }
        let l = &self.loss;
        if !(l.delta_0 >= 0.0 && l.delta_t >= 0.0 && l.t1_scatter >= 0.0 && 1.0 + l.radial > 0.0) {
            return bad("loss model parameters must be nonnegative".into());
        }
        if let Some(dies) = &self.dies {
            if dies.is_empty() {
                return bad("empty die list".into());
            }
        }
        self.ra_profile.validate()?;
        self.t1_model.validate()
    }

    pub fn layout(&self) -> Vec<GridPosition> {
        self.dies.clone().unwrap_or_else(standard_die_layout)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubDieSpec {
    pub name: String,
    pub designs: Vec<QubitDesign>,
    /// Number of dies carrying this sub-die, spread evenly over the layout.
    pub n_dies: usize,
}

/// What gets placed on the wafer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSet {
    pub subdies: Vec<SubDieSpec>,
    /// Designed cds (nm) of the JJ test-structure areas; BE = TE.
    pub jj_cds: Vec<f64>,
    pub jj_per_area: usize,
}

impl Default for DesignSet {
    /// D1 on 32 dies and D2 on 24 (400 qubits), 8 JJs × 12 areas per die.
    fn default() -> Self {
        Self {
            subdies: vec![
                SubDieSpec { name: "D1".into(), designs: designs::d1_designs(), n_dies: 32 },
                SubDieSpec { name: "D2".into(), designs: designs::d2_designs(), n_dies: 24 },
            ],
            jj_cds: designs::JJ_TEST_CDS.to_vec(),
            jj_per_area: 8,
        }
    }
}

impl DesignSet {
    /// JJ structures only.
    pub fn jj_only(jj_per_area: usize) -> Self {
        Self { subdies: Vec::new(), jj_per_area, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionTruth {
    /// μm²
    pub area: f64,
    /// Ω·μm²
    pub ra: f64,
}

/// Latent values behind one device. Qubit junctions are in parallel
/// (a SQUID has two); test structures carry the probe contact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceTruth {
    pub grid_position: GridPosition,
    pub ra_nominal: f64,
    pub junctions: Vec<JunctionTruth>,
    pub r_contact: f64,
    /// MHz; qubits only.
    pub e_c: Option<f64>,
    pub functional: bool,
    /// Planted mean T1, μs; qubits only.
    pub t1_us: Option<f64>,
}

impl DeviceTruth {
    /// Measured normal resistance with every RA scaled by `ra_scale`.
    pub fn r_n(&self, ra_scale: f64) -> f64 {
        let g: f64 = self.junctions.iter().map(|j| j.area / (j.ra * ra_scale)).sum();
        1.0 / g + self.r_contact
    }

    /// Qubit frequency (GHz) at the flux sweet spot.
    pub fn f_qb(&self, ra_scale: f64, consts: &PhysicalConstants) -> Result<Option<f64>> {
        let Some(e_c) = self.e_c else { return Ok(None) };
        let mut e_j = 0.0;
        for j in &self.junctions {
            e_j += ej_from_rn(j.ra * ra_scale / j.area, consts)?.0;
        }
        Ok(Some(fqb_from_energies(Ghz(e_j), Mhz(e_c))?.0))
    }

    pub fn total_area(&self) -> f64 {
        self.junctions.iter().map(|j| j.area).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub aging_per_day: f64,
    pub constants: PhysicalConstants,
    pub devices: BTreeMap<String, DeviceTruth>,
}

impl GroundTruth {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Stream id of a die's RNG substream.
fn die_stream(pos: GridPosition) -> u64 {
    (u64::from(pos.0 as u32) << 32) | u64::from(pos.1 as u32)
}

fn positive_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64, what: &str) -> Result<f64> {
    for _ in 0..MAX_RESAMPLES {
        let z: f64 = rng.sample(StandardNormal);
        let v = mean + sd * z;
        if v > 0.0 {
            return Ok(v);
        }
    }
    Err(Error::Sampling(format!("{what}: no positive draw from N({mean}, {sd}) in {MAX_RESAMPLES} tries")))
}

/// Evenly spread `n` of `total` slots, rotated by `offset`.
fn spread(total: usize, n: usize, offset: usize) -> Vec<bool> {
    let mut pick = vec![false; total];
    for i in 0..total {
        if (i + 1) * n / total > i * n / total {
            pick[(i + offset) % total] = true;
        }
    }
    pick
}

struct DieOut {
    record: DieRecord,
    truth: Vec<(String, DeviceTruth)>,
}

struct Ctx<'a> {
    cfg: &'a SimConfig,
    consts: PhysicalConstants,
    participation: BTreeMap<String, f64>,
}

impl Ctx<'_> {
    fn junction(&self, rng: &mut ChaCha8Rng, cd: f64, ra_nominal: f64) -> Result<JunctionTruth> {
        let a0 = estimate_area(cd, cd, &self.cfg.cd_offsets)?;
        let area = positive_normal(rng, a0, self.cfg.sigma_area, "junction area")?;
        let ra = positive_normal(rng, ra_nominal, 0.01 * self.cfg.rsd_ra_local * ra_nominal, "RA product")?;
        Ok(JunctionTruth { area, ra })
    }

    fn die(&self, pos: GridPosition, placed: &[&SubDieSpec], set: &DesignSet) -> Result<DieOut> {
        let cfg = self.cfg;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(die_stream(pos));
        let r = pos.center_radius();
        let ra_nominal = cfg.ra_profile.eval(r);
        let at = cfg.measured_at_h;
        let tag = pos.tag();
        let mut truth = Vec::new();
        let mut subdies = Vec::new();

        for spec in placed {
            let mut sub = SubDieRecord { name: spec.name.clone(), qubits: Vec::new(), jj_structures: Vec::new(), measurements: Vec::new() };
            for d in &spec.designs {
                let id = format!("{tag}-{}-{}", spec.name, d.name);
                let n_jj = if d.has_squid { 2 } else { 1 };
                let junctions = (0..n_jj).map(|_| self.junction(&mut rng, d.cd_design, ra_nominal)).collect::<Result<Vec<_>>>()?;
                let functional = !rng.random_bool(cfg.yield_loss_prob);
                let mut dt = DeviceTruth {
                    grid_position: pos,
                    ra_nominal,
                    junctions,
                    r_contact: 0.0,
                    e_c: Some(d.e_c),
                    functional,
                    t1_us: None,
                };
                let f = dt.f_qb(1.0, &self.consts)?.expect("qubit");
                let l = &cfg.loss;
                let delta = l.delta_0 + l.delta_t * (1.0 + l.radial * (r / WAFER_RADIUS_MM).powi(2)) * self.participation[&d.name];
                let t1 = 1e6 / (2.0 * PI * f * 1e9 * delta);
                dt.t1_us = Some(t1);

                sub.measurements.push(MeasurementRecord::scalar(&id, MeasurementKind::NormalResistance, dt.r_n(1.0), at));
                // repeats are drawn for every qubit so a dead one does not
                // shift the stream of its neighbours
                let mut t1s = Vec::with_capacity(l.t1_repeats);
                for _ in 0..l.t1_repeats {
                    t1s.push(positive_normal(&mut rng, t1, l.t1_scatter * t1, "T1")?);
                }
                if functional {
                    sub.measurements.push(MeasurementRecord::scalar(&id, MeasurementKind::QubitFrequency, f, at));
                    for (k, v) in t1s.into_iter().enumerate() {
                        sub.measurements.push(MeasurementRecord::scalar(&id, MeasurementKind::T1, v, at + k as f64));
                    }
                }
                sub.qubits.push(QubitDevice { device_id: id.clone(), design: d.clone() });
                truth.push((id, dt));
            }
            subdies.push(sub);
        }

        if set.jj_per_area > 0 && !set.jj_cds.is_empty() {
            let mut sub = SubDieRecord { name: JJ_SUBDIE.into(), qubits: Vec::new(), jj_structures: Vec::new(), measurements: Vec::new() };
            for &cd in &set.jj_cds {
                for k in 0..set.jj_per_area {
                    let id = format!("{tag}-JJ-{cd:.0}-{k}");
                    let j = self.junction(&mut rng, cd, ra_nominal)?;
                    let dt = DeviceTruth {
                        grid_position: pos,
                        ra_nominal,
                        junctions: vec![j],
                        r_contact: cfg.r_contact,
                        e_c: None,
                        functional: true,
                        t1_us: None,
                    };
                    let mut s = JJTestStructure::new(&id, cd, cd);
                    s.r_contact = cfg.r_contact;
                    sub.jj_structures.push(s);
                    sub.measurements.push(MeasurementRecord::scalar(&id, MeasurementKind::NormalResistance, dt.r_n(1.0), at));
                    truth.push((id, dt));
                }
            }
            subdies.push(sub);
        }
        Ok(DieOut { record: DieRecord { grid_position: pos, center_radius: r, subdies }, truth })
    }
}

/// Generates one wafer. Dies are simulated in parallel, each from its own
/// substream of `cfg.seed`, so the output does not depend on thread count.
pub fn simulate_wafer(cfg: &SimConfig, set: &DesignSet) -> Result<(WaferDataset, GroundTruth)> {
    cfg.validate()?;
    let layout = cfg.layout();
    let mut sorted = layout.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != layout.len() {
        return Err(Error::Config("duplicate die positions".into()));
    }
    let mut participation_map = BTreeMap::new();
    for spec in &set.subdies {
        if spec.n_dies > layout.len() {
            return Err(Error::Config(format!("{} on {} dies, layout has {}", spec.name, spec.n_dies, layout.len())));
        }
        for d in &spec.designs {
            participation_map.insert(d.name.clone(), participation(d.cap_width, d.cap_gap, &cfg.loss.stack)?.p_total);
        }
    }
    let picks: Vec<Vec<bool>> = set
        .subdies
        .iter()
        .enumerate()
        .map(|(k, s)| spread(layout.len(), s.n_dies, k * layout.len() / (2 * set.subdies.len().max(1))))
        .collect();
    let ctx = Ctx { cfg, consts: PhysicalConstants::default(), participation: participation_map };

    let outs: Vec<DieOut> = layout
        .par_iter()
        .enumerate()
        .map(|(i, &pos)| {
            let placed: Vec<&SubDieSpec> = set.subdies.iter().zip(&picks).filter(|(_, p)| p[i]).map(|(s, _)| s).collect();
            ctx.die(pos, &placed, set)
        })
        .collect::<Result<_>>()?;

    let mut ds = WaferDataset::new(cfg.wafer_id.clone(), cfg.batch_id.clone(), cfg.fabrication_date);
    let mut devices = BTreeMap::new();
    for o in outs {
        ds.dies.push(o.record);
        devices.extend(o.truth);
    }
    let truth = GroundTruth { seed: cfg.seed, aging_per_day: cfg.aging_per_day, constants: ctx.consts, devices };
    if let Some(spec) = &cfg.t1_series {
        attach_series(&mut ds, &truth, cfg, spec)?;
    }
    Ok((ds, truth))
}

/// Replaces the T1 readings of the most central functional D1 qubit of the
/// requested design by a bath-driven time series.
fn attach_series(ds: &mut WaferDataset, truth: &GroundTruth, cfg: &SimConfig, spec: &T1SeriesSpec) -> Result<()> {
    let target = ds
        .dies
        .iter()
        .flat_map(|d| d.subdies.iter().flat_map(move |s| s.qubits.iter().map(move |q| (d, s, q))))
        .filter(|(_, s, q)| s.name == "D1" && q.design.name == spec.design && truth.devices[&q.device_id].functional)
        .min_by(|a, b| a.0.center_radius.total_cmp(&b.0.center_radius).then(a.0.grid_position.cmp(&b.0.grid_position)))
        .map(|(d, _, q)| (d.grid_position, q.device_id.clone()));
    let Some((pos, id)) = target else { return Ok(()) };
    let f = truth.devices[&id].f_qb(1.0, &truth.constants)?.expect("qubit");
    let series = simulate_t1_series(&cfg.t1_model, f, spec.duration_h, spec.interval_min, cfg.seed ^ die_stream(pos))?;
    let at = cfg.measured_at_h;
    for die in ds.dies.iter_mut().filter(|d| d.grid_position == pos) {
        for sub in die.subdies.iter_mut() {
            if sub.qubits.iter().any(|q| q.device_id == id) {
                sub.measurements.retain(|m| !(m.device_id == id && m.kind == MeasurementKind::T1));
                for (t, v) in series.times_h.iter().zip(&series.t1_us) {
                    sub.measurements.push(MeasurementRecord::scalar(&id, MeasurementKind::T1, *v, at + t));
                }
            }
        }
    }
    Ok(())
}

/// Re-measures the wafer `days` later with every RA scaled by
/// `1 + aging_per_day·days`: resistances and frequencies are re-derived from
/// the truth, all timestamps move forward.
pub fn apply_aging(ds: &WaferDataset, truth: &GroundTruth, days: f64) -> Result<WaferDataset> {
    if !(days >= 0.0 && days.is_finite()) {
        return Err(Error::Invalid(format!("elapsed days {days} must be finite and nonnegative")));
    }
    if days == 0.0 {
        return Ok(ds.clone());
    }
    let scale = 1.0 + truth.aging_per_day * days;
    if !(scale > 0.0) {
        return Err(Error::domain(format!("aged RA non-positive after {days} days")));
    }
    let mut out = ds.clone();
    for m in out.dies.iter_mut().flat_map(|d| d.subdies.iter_mut()).flat_map(|s| s.measurements.iter_mut()) {
        m.measured_at += 24.0 * days;
        let Some(dt) = truth.devices.get(&m.device_id) else { continue };
        let v = match m.kind {
            MeasurementKind::NormalResistance => Some(dt.r_n(scale)),
            MeasurementKind::QubitFrequency => dt.f_qb(scale, &truth.constants)?,
            _ => None,
        };
        if let Some(v) = v {
            m.value = crate::dataset::MeasurementValue::Scalar(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{functional_yield, validate_dataset};
    use crate::analysis::{jj_area_groups, rsd_points};
    use crate::stats::{crossover_area, fit_rsd_model, radial_profile, RsdModel};
    use crate::transmon::scaled_frequency;

    fn rn_by_key(ds: &WaferDataset) -> BTreeMap<String, f64> {
        ds.dies
            .iter()
            .flat_map(|d| d.subdies.iter())
            .flat_map(|s| s.measurements.iter())
            .filter(|m| m.kind == MeasurementKind::NormalResistance)
            .map(|m| (m.device_id.clone(), m.valid_scalar().unwrap()))
            .collect()
    }

    #[test]
    fn layout_has_75_dies() {
        let l = standard_die_layout();
        assert_eq!(l.len(), 75);
        assert!(l.contains(&GridPosition(0, 0)));
    }

    #[test]
    fn default_wafer_shape() {
        let (ds, truth) = simulate_wafer(&SimConfig::default(), &DesignSet::default()).unwrap();
        assert!(validate_dataset(&ds).is_empty(), "{:?}", &validate_dataset(&ds)[..1]);
        assert_eq!(ds.dies.len(), 75);
        assert_eq!(ds.qubit_count(), 400);
        assert_eq!(ds.jj_structures().count(), 75 * 96);
        let y = functional_yield(&ds).unwrap();
        assert!(y > 0.96 && y < 1.0, "{y}");
        assert_eq!(truth.devices.len(), 400 + 7200);
    }

    #[test]
    fn deterministic_regardless_of_threads() {
        let cfg = SimConfig { seed: 9, ..SimConfig::default() };
        let a = simulate_wafer(&cfg, &DesignSet::default()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate_wafer(&cfg, &DesignSet::default()).unwrap());
        assert_eq!(a.0.to_json_string().unwrap(), b.0.to_json_string().unwrap());
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn zero_noise_gives_identical_resistances() {
        let cfg = SimConfig {
            sigma_area: 0.0,
            rsd_ra_local: 0.0,
            ra_profile: RaProfile::flat(300.0),
            ..SimConfig::default()
        };
        let (ds, _) = simulate_wafer(&cfg, &DesignSet::default()).unwrap();
        let mut by_design: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (id, v) in rn_by_key(&ds) {
            // c-1r0-D1-i2 -> D1-i2, c0r0-JJ-150-3 -> JJ-150
            let rest = &id[["-D1-", "-D2-", "-JJ-"].iter().find_map(|p| id.find(p)).unwrap() + 1..];
            let key = if rest.starts_with("JJ") { rest.rsplit_once('-').unwrap().0 } else { rest };
            by_design.entry(key.to_string()).or_default().push(v);
        }
        assert_eq!(by_design.len(), 15 + 12);
        for vs in by_design.values() {
            assert!(vs.iter().all(|v| *v == vs[0]));
        }
    }

    #[test]
    fn single_dense_die_recovers_planted_spread() {
        let mut crossovers = Vec::new();
        for seed in 0..20 {
            let cfg = SimConfig { seed, dies: Some(vec![GridPosition(0, 0)]), t1_series: None, ..SimConfig::default() };
            let (ds, truth) = simulate_wafer(&cfg, &DesignSet::jj_only(146)).unwrap();
            assert_eq!(truth.devices.len(), 1752);
            let groups = jj_area_groups(&ds, &cfg.cd_offsets, None).unwrap();
            let fit = fit_rsd_model(&rsd_points(&groups, 2), RsdModel::A).unwrap();
            if seed == cfg.seed.min(1) {
                assert!((fit.rsd_ra - 4.47).abs() < 0.5, "{}", fit.rsd_ra);
                assert!((fit.sigma / 0.00334 - 1.0).abs() < 0.15, "{}", fit.sigma);
            }
            crossovers.push(crossover_area(&fit).unwrap().area);
        }
        crossovers.sort_by(f64::total_cmp);
        let median = 0.5 * (crossovers[9] + crossovers[10]);
        assert!((median / 0.0747 - 1.0).abs() < 0.1, "{median}");
    }

    #[test]
    fn radial_profile_tracks_planted_ra() {
        let cfg = SimConfig { t1_series: None, ..SimConfig::default() };
        let (ds, truth) = simulate_wafer(&cfg, &DesignSet::jj_only(8)).unwrap();
        let a0 = estimate_area(200.0, 200.0, &CdCalibration::default()).unwrap();
        let mut pos = Vec::new();
        let mut vals = Vec::new();
        let rn = rn_by_key(&ds);
        for d in &ds.dies {
            let tag = d.grid_position.tag();
            let v: Vec<f64> = (0..8).map(|k| rn[&format!("{tag}-JJ-200-{k}")] - 32.0).collect();
            pos.push(d.grid_position.center_mm());
            vals.push(v.iter().sum::<f64>() / 8.0 * a0);
        }
        let prof = radial_profile(&pos, &vals).unwrap();
        for d in &ds.dies {
            let r = d.center_radius;
            let want = cfg.ra_profile.eval(r);
            assert!((prof.eval(r) / want - 1.0).abs() < 0.05, "r={r} {} {want}", prof.eval(r));
        }
        assert!(!truth.devices.is_empty());
    }

    #[test]
    fn aging_identity_and_drift() {
        let (ds, truth) = simulate_wafer(&SimConfig::default(), &DesignSet::default()).unwrap();
        assert_eq!(apply_aging(&ds, &truth, 0.0).unwrap(), ds);
        let aged = apply_aging(&ds, &truth, 146.0).unwrap();
        let (a, b) = (rn_by_key(&ds), rn_by_key(&aged));
        let mean = |m: &BTreeMap<String, f64>| m.values().sum::<f64>() / m.len() as f64;
        let change = 100.0 * (mean(&b) / mean(&a) - 1.0);
        assert!((change + 3.7).abs() < 0.1, "{change}");

        let freqs = ds.measurements_by_device(MeasurementKind::QubitFrequency);
        let aged_f = aged.measurements_by_device(MeasurementKind::QubitFrequency);
        for (id, ms) in &freqs {
            let area = truth.devices[*id].total_area();
            let before = scaled_frequency(Ghz(ms[0].valid_scalar().unwrap()), area).unwrap();
            let after = scaled_frequency(Ghz(aged_f[id][0].valid_scalar().unwrap()), area).unwrap();
            assert!(after > before);
        }
        assert!(apply_aging(&ds, &truth, 1e5).is_err());
        assert!(apply_aging(&ds, &truth, -1.0).is_err());
    }

    #[test]
    fn config_json_defaults_and_checks() {
        let c = SimConfig::from_json_str(r#"{"seed": 42}"#).unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.r_contact, 32.0);
        assert!(SimConfig::from_json_str(r#"{"yield_loss_prob": 1.5}"#).is_err());
        assert!(SimConfig::from_json_str(r#"{"sigma_area": -1}"#).is_err());
        let tab = RaProfile::Tabulated { radii: vec![0.0, 100.0], values: vec![300.0, 250.0] };
        assert_eq!(tab.eval(50.0), 275.0);
        assert_eq!(tab.eval(140.0), 250.0);
    }
}
