// SPDX-License-Identifier: Apache-2.0

//! Analysis recipes, one per figure-level computation.

use std::collections::BTreeMap;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use waferqc_core::analysis::{jj_area_groups, rsd_points};
use waferqc_core::epr::{participation, InterfaceStack};
use waferqc_core::geometry::{estimate_area, CdCalibration};
use waferqc_core::stats::{
    crossover_area, detect_jump, fit_gaussian, fit_loss_model, fit_lorentzian_psd, fit_rsd_model, group_summary,
    radial_profile, LorentzianOptions, RsdModel,
};
use waferqc_core::tls::{extract_track, tls_density, track_psd, SwapMap};
use waferqc_core::transmon::{quality_factor, rsd, scaled_frequency};
use waferqc_core::{
    functional_yield, validate_dataset, GridPosition, Ghz, MeasurementKind, QubitDesign, WaferDataset,
};

use crate::report::{inputs_digest, AnalysisReport, Table};
use crate::svg::{emit_wafer_map, DieValue};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    /// Resistance and frequency spread vs junction area; RA/area decomposition
    #[value(name = "fig4a-rsd")]
    Fig4aRsd,
    /// Loss tangents from T1 vs participation ratio
    #[value(name = "fig3a-loss")]
    Fig3aLoss,
    /// Per-die mean T1 with radial profile and SVG map
    #[value(name = "fig2a-wafermap")]
    Fig2aWafermap,
    /// Resistance drift between two measurements of a wafer
    #[value(name = "fig4b-aging")]
    Fig4bAging,
    /// Per-wafer resistance summaries across a batch
    #[value(name = "supp7-batch")]
    Supp7Batch,
    /// TLS density, defect track and fluctuator rate from a swap map
    #[value(name = "fig3b-tls")]
    Fig3bTls,
    /// Gaussian statistics and jumps of a T1 time series
    #[value(name = "fig2b-timestats")]
    Fig2bTimestats,
    /// Per-die mean area-scaled qubit frequency with SVG map
    #[value(name = "fig4c-scaledmap")]
    Fig4cScaledmap,
}

impl Recipe {
    pub fn name(self) -> &'static str {
        match self {
            Recipe::Fig4aRsd => "fig4a-rsd",
            Recipe::Fig3aLoss => "fig3a-loss",
            Recipe::Fig2aWafermap => "fig2a-wafermap",
            Recipe::Fig4bAging => "fig4b-aging",
            Recipe::Supp7Batch => "supp7-batch",
            Recipe::Fig3bTls => "fig3b-tls",
            Recipe::Fig2bTimestats => "fig2b-timestats",
            Recipe::Fig4cScaledmap => "fig4c-scaledmap",
        }
    }

    pub fn all() -> &'static [Recipe] {
        Recipe::value_variants()
    }

    fn needs_swap_map(self) -> bool {
        self == Recipe::Fig3bTls
    }
}

/// Tunables shared by the recipes; each recipe reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecipeParams {
    /// Restrict qubit recipes to one design name.
    pub design: Option<String>,
    /// Restrict JJ recipes to one die.
    pub die: Option<GridPosition>,
    pub prominence: f64,
    /// Track seed, GHz; defaults to the map centre.
    pub seed_ghz: Option<f64>,
    pub window_ghz: f64,
    pub n_sigma: f64,
    pub jump_window: usize,
    pub iqr_k: f64,
    pub calibration: CdCalibration,
}

impl Default for RecipeParams {
    fn default() -> Self {
        Self {
            design: None,
            die: None,
            prominence: waferqc_core::tls::DEFAULT_PROMINENCE,
            seed_ghz: None,
            window_ghz: 0.008,
            n_sigma: 6.0,
            jump_window: 20,
            iqr_k: 1.5,
            calibration: CdCalibration::default(),
        }
    }
}

/// Parsed inputs together with their raw bytes (for the digest).
pub struct Inputs {
    pub datasets: Vec<WaferDataset>,
    pub swap_maps: Vec<SwapMap>,
    raw: Vec<Vec<u8>>,
}

impl Inputs {
    pub fn from_bytes(datasets: Vec<Vec<u8>>, swap_maps: Vec<Vec<u8>>) -> Result<Self, CliError> {
        let utf8 = |b: &[u8]| std::str::from_utf8(b).map(str::to_owned).map_err(|e| CliError::Validation(e.to_string()));
        let ds = datasets
            .iter()
            .map(|b| WaferDataset::from_json_str(&utf8(b)?).map_err(CliError::from))
            .collect::<Result<Vec<_>, _>>()?;
        let maps = swap_maps
            .iter()
            .map(|b| SwapMap::from_json_str(&utf8(b)?).map_err(CliError::from))
            .collect::<Result<Vec<_>, _>>()?;
        let raw = datasets.into_iter().chain(swap_maps).collect();
        Ok(Self { datasets: ds, swap_maps: maps, raw })
    }

    pub fn from_paths(datasets: &[impl AsRef<Path>], swap_maps: &[impl AsRef<Path>]) -> Result<Self, CliError> {
        let read = |p: &Path| std::fs::read(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())));
        Self::from_bytes(
            datasets.iter().map(|p| read(p.as_ref())).collect::<Result<_, _>>()?,
            swap_maps.iter().map(|p| read(p.as_ref())).collect::<Result<_, _>>()?,
        )
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Runs one recipe. Artifacts go to `out_dir` when given and are listed in
/// the report by file name.
pub fn run_recipe(
    recipe: Recipe,
    inputs: &Inputs,
    params: &RecipeParams,
    out_dir: Option<&Path>,
) -> Result<AnalysisReport, CliError> {
    for ds in &inputs.datasets {
        let v = validate_dataset(ds);
        if let Some(first) = v.first() {
            return Err(CliError::Validation(format!(
                "{}: {} violation(s), first: {first}",
                ds.wafer_id,
                v.len()
            )));
        }
    }
    if recipe.needs_swap_map() {
        if inputs.swap_maps.is_empty() {
            return Err(CliError::Validation(format!("{} needs a swap map (--swap-map)", recipe.name())));
        }
    } else if inputs.datasets.is_empty() {
        return Err(CliError::Validation(format!("{} needs a dataset (--dataset)", recipe.name())));
    }
    let pj = serde_json::to_value(params).expect("params serialize");
    let blobs: Vec<&[u8]> = inputs.raw.iter().map(Vec::as_slice).collect();
    let mut rep = AnalysisReport::new(recipe.name(), inputs_digest(&blobs, &json!({"recipe": recipe.name(), "params": pj})), pj);
    match recipe {
        Recipe::Fig4aRsd => fig4a(&inputs.datasets[0], params, &mut rep)?,
        Recipe::Fig3aLoss => fig3a(&inputs.datasets[0], params, &mut rep)?,
        Recipe::Fig2aWafermap => die_map(&inputs.datasets[0], params, &mut rep, out_dir, MapQuantity::T1)?,
        Recipe::Fig4cScaledmap => die_map(&inputs.datasets[0], params, &mut rep, out_dir, MapQuantity::Scaled)?,
        Recipe::Fig4bAging => fig4b(&inputs.datasets, params, &mut rep)?,
        Recipe::Supp7Batch => supp7(&inputs.datasets, params, &mut rep)?,
        Recipe::Fig3bTls => fig3b(&inputs.swap_maps[0], params, &mut rep, out_dir)?,
        Recipe::Fig2bTimestats => fig2b(&inputs.datasets[0], params, &mut rep)?,
    }
    Ok(rep)
}

/// First valid scalar of every device for one measurement kind.
fn first_values(ds: &WaferDataset, kind: MeasurementKind) -> BTreeMap<String, f64> {
    ds.measurements_by_device(kind)
        .into_iter()
        .filter_map(|(id, ms)| ms.iter().find_map(|m| m.valid_scalar()).map(|v| (id.to_string(), v)))
        .collect()
}

fn all_values(ds: &WaferDataset, kind: MeasurementKind) -> BTreeMap<String, Vec<(f64, f64)>> {
    ds.measurements_by_device(kind)
        .into_iter()
        .map(|(id, ms)| {
            let mut v: Vec<(f64, f64)> =
                ms.iter().filter_map(|m| m.valid_scalar().map(|x| (m.measured_at, x))).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            (id.to_string(), v)
        })
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

fn design_selected(params: &RecipeParams, d: &QubitDesign) -> bool {
    params.design.as_deref().is_none_or(|n| n == d.name)
}

/// Nominal junction area of a qubit (both SQUID arms).
fn qubit_area(d: &QubitDesign, cal: &CdCalibration) -> Result<f64, CliError> {
    let a = estimate_area(d.cd_design, d.cd_design, cal)?;
    Ok(if d.has_squid { 2.0 * a } else { a })
}

fn fig4a(ds: &WaferDataset, params: &RecipeParams, rep: &mut AnalysisReport) -> Result<(), CliError> {
    let groups = jj_area_groups(ds, &params.calibration, params.die)?;
    let mut t = Table::new(&["cd_be_nm", "cd_te_nm", "area_um2", "n", "rsd_conductance_pct", "rsd_resistance_pct", "mean_r_ohm"]);
    for g in &groups {
        t.push(vec![
            num(g.cd_be),
            num(g.cd_te),
            num(g.area),
            g.resistances.len().into(),
            g.conductance_rsd().map_or(Value::Null, num),
            g.resistance_rsd().map_or(Value::Null, num),
            num(mean(&g.resistances)),
        ]);
    }
    rep.tables.insert("areas".into(), t);
    let pts = rsd_points(&groups, 2);
    for (key, model) in [("model_a", RsdModel::A), ("model_b", RsdModel::B)] {
        let fit = fit_rsd_model(&pts, model)?;
        let c = crossover_area(&fit)?;
        rep.scalars.insert(format!("{key}_crossover_area_um2"), if c.infinite { f64::INFINITY } else { c.area });
        rep.fits.insert(key.into(), fit.to_fit_result());
    }

    // frequency vs resistance spread per design, over functional qubits
    let f = first_values(ds, MeasurementKind::QubitFrequency);
    let r = first_values(ds, MeasurementKind::NormalResistance);
    let mut by_design: BTreeMap<String, (Vec<f64>, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (_, _, q) in ds.qubits().filter(|(_, _, q)| design_selected(params, &q.design)) {
        if let (Some(fv), Some(rv)) = (f.get(&q.device_id), r.get(&q.device_id)) {
            let e = by_design.entry(q.design.name.clone()).or_default();
            e.0.push(*fv);
            e.1.push(*fv + q.design.e_c * 1e-3);
            e.2.push(*rv);
        }
    }
    let mut qt = Table::new(&["design", "n", "rsd_fqb_pct", "rsd_fqb_plus_ec_pct", "rsd_rn_pct", "half_rsd_rn_pct"]);
    for (name, (fs, fp, rs)) in &by_design {
        let (a, b, c) = (rsd(fs), rsd(fp), rsd(rs));
        qt.push(vec![
            name.clone().into(),
            fs.len().into(),
            a.map_or(Value::Null, |v| num(100.0 * v)),
            b.map_or(Value::Null, |v| num(100.0 * v)),
            c.map_or(Value::Null, |v| num(100.0 * v)),
            c.map_or(Value::Null, |v| num(50.0 * v)),
        ]);
    }
    rep.tables.insert("qubits".into(), qt);
    Ok(())
}

fn fig3a(ds: &WaferDataset, params: &RecipeParams, rep: &mut AnalysisReport) -> Result<(), CliError> {
    let f = first_values(ds, MeasurementKind::QubitFrequency);
    let t1 = all_values(ds, MeasurementKind::T1);
    let stack = InterfaceStack::default();
    let mut points = Vec::new();
    let mut by_design: BTreeMap<String, (f64, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (_, _, q) in ds.qubits().filter(|(_, _, q)| design_selected(params, &q.design)) {
        let (Some(fq), Some(ts)) = (f.get(&q.device_id), t1.get(&q.device_id)) else { continue };
        let p = participation(q.design.cap_width, q.design.cap_gap, &stack)?.p_total;
        let t_mean = mean(&ts.iter().map(|x| x.1).collect::<Vec<_>>());
        let inv_q = 1.0 / quality_factor(t_mean, Ghz(*fq))?;
        points.push((p, inv_q));
        let e = by_design.entry(q.design.name.clone()).or_insert((p, Vec::new(), Vec::new()));
        e.1.push(t_mean);
        e.2.push(inv_q);
    }
    let fit = fit_loss_model(&points)?;
    rep.fits.insert("loss_model".into(), fit.to_fit_result());
    if let Some(ms) = fit.t1_limit_at_3ghz {
        rep.scalars.insert("t1_limit_ms_at_3ghz".into(), ms);
    }
    rep.scalars.insert("n_qubits".into(), points.len() as f64);
    let mut t = Table::new(&["design", "p_total", "n", "mean_t1_us", "mean_inv_q"]);
    for (name, (p, ts, qs)) in &by_design {
        t.push(vec![name.clone().into(), num(*p), ts.len().into(), num(mean(ts)), num(mean(qs))]);
    }
    rep.tables.insert("designs".into(), t);
    Ok(())
}

enum MapQuantity {
    T1,
    Scaled,
}

fn die_map(
    ds: &WaferDataset,
    params: &RecipeParams,
    rep: &mut AnalysisReport,
    out_dir: Option<&Path>,
    what: MapQuantity,
) -> Result<(), CliError> {
    let t1 = all_values(ds, MeasurementKind::T1);
    let f = first_values(ds, MeasurementKind::QubitFrequency);
    let mut per_die: BTreeMap<GridPosition, Vec<f64>> = BTreeMap::new();
    for (d, _, q) in ds.qubits().filter(|(_, _, q)| design_selected(params, &q.design)) {
        let v = match what {
            MapQuantity::T1 => t1.get(&q.device_id).map(|ts| mean(&ts.iter().map(|x| x.1).collect::<Vec<_>>())),
            MapQuantity::Scaled => match f.get(&q.device_id) {
                Some(fq) => Some(scaled_frequency(Ghz(*fq), qubit_area(&q.design, &params.calibration)?)?),
                None => None,
            },
        };
        if let Some(v) = v {
            per_die.entry(d.grid_position).or_default().push(v);
        }
    }
    let cells: Vec<DieValue> =
        per_die.iter().map(|(p, vs)| DieValue { position: *p, mean: mean(vs), std: std(vs) }).collect();
    let positions: Vec<(f64, f64)> = cells.iter().map(|c| c.position.center_mm()).collect();
    let means: Vec<f64> = cells.iter().map(|c| c.mean).collect();
    let profile = radial_profile(&positions, &means)?;

    let (unit, stem) = match what {
        MapQuantity::T1 => ("t1_us", "fig2a-wafermap"),
        MapQuantity::Scaled => ("fqb_per_sqrt_area_ghz_um", "fig4c-scaledmap"),
    };
    let mut t = Table::new(&["col", "row", "radius_mm", "n", &format!("mean_{unit}"), &format!("std_{unit}")]);
    for (c, vs) in cells.iter().zip(per_die.values()) {
        t.push(vec![
            c.position.0.into(),
            c.position.1.into(),
            num(c.position.center_radius()),
            vs.len().into(),
            num(c.mean),
            num(c.std),
        ]);
    }
    rep.tables.insert("dies".into(), t);
    let mut bt = Table::new(&["r_lo_mm", "r_hi_mm", "n", "mean", "std", "mean_radius_mm"]);
    for b in &profile.bins {
        bt.push(vec![num(b.r_lo), num(b.r_hi), b.n.into(), num(b.mean), num(b.std), num(b.mean_radius)]);
    }
    rep.tables.insert("radial_profile".into(), bt);
    rep.scalars.insert("n_dies".into(), cells.len() as f64);
    rep.scalars.insert("profile_center".into(), profile.eval(0.0));
    rep.scalars.insert("profile_edge".into(), profile.eval(profile.r_max));
    rep.scalars.insert("wafer_mean".into(), mean(&means));

    if let Some(dir) = out_dir {
        let svg = emit_wafer_map(&cells, Some(&profile), &format!("{} {}", ds.wafer_id, unit))?;
        let name = format!("{stem}.svg");
        std::fs::write(dir.join(&name), svg).map_err(|e| CliError::Io(e.to_string()))?;
        rep.artifacts.push(name);
    }
    Ok(())
}

fn fig4b(datasets: &[WaferDataset], _params: &RecipeParams, rep: &mut AnalysisReport) -> Result<(), CliError> {
    let [before, after, ..] = datasets else {
        return Err(CliError::Validation("fig4b-aging needs two datasets: before and after".into()));
    };
    let t0 = before.measurements().map(|(_, _, m)| m.measured_at).fold(f64::INFINITY, f64::min);
    let t1 = after.measurements().map(|(_, _, m)| m.measured_at).fold(f64::INFINITY, f64::min);
    let r0 = first_values(before, MeasurementKind::NormalResistance);
    let r1 = first_values(after, MeasurementKind::NormalResistance);
    let mut by_area: BTreeMap<(u64, u64), (f64, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (_, _, s) in before.jj_structures() {
        if let (Some(a), Some(b)) = (r0.get(&s.device_id), r1.get(&s.device_id)) {
            let e = by_area.entry((s.cd_design_be.to_bits(), s.cd_design_te.to_bits())).or_insert((s.cd_design_be, vec![], vec![]));
            e.1.push(*a);
            e.2.push(*b);
        }
    }
    if by_area.is_empty() {
        return Err(CliError::Validation("no JJ structures measured in both datasets".into()));
    }
    let mut t = Table::new(&["cd_be_nm", "n", "mean_before_ohm", "mean_after_ohm", "change_pct"]);
    let (mut all0, mut all1) = (Vec::new(), Vec::new());
    for (cd, a, b) in by_area.values() {
        t.push(vec![num(*cd), a.len().into(), num(mean(a)), num(mean(b)), num(100.0 * (mean(b) / mean(a) - 1.0))]);
        all0.extend_from_slice(a);
        all1.extend_from_slice(b);
    }
    rep.tables.insert("areas".into(), t);
    rep.scalars.insert("mean_rn_change_pct".into(), 100.0 * (mean(&all1) / mean(&all0) - 1.0));
    rep.scalars.insert("elapsed_days".into(), (t1 - t0) / 24.0);
    rep.scalars.insert("n_structures".into(), all0.len() as f64);

    // area-scaled frequency of qubits present in both
    let f0 = first_values(before, MeasurementKind::QubitFrequency);
    let f1 = first_values(after, MeasurementKind::QubitFrequency);
    let shifts: Vec<f64> = before
        .qubits()
        .filter_map(|(_, _, q)| Some((f0.get(&q.device_id)?, f1.get(&q.device_id)?)))
        .map(|(a, b)| 100.0 * (b / a - 1.0))
        .collect();
    if !shifts.is_empty() {
        rep.scalars.insert("mean_scaled_frequency_change_pct".into(), mean(&shifts));
    }
    Ok(())
}

fn supp7(datasets: &[WaferDataset], params: &RecipeParams, rep: &mut AnalysisReport) -> Result<(), CliError> {
    let mut groups: BTreeMap<(String, i64), Vec<f64>> = BTreeMap::new();
    let mut yields = Table::new(&["wafer", "batch", "qubits", "functional_yield"]);
    for ds in datasets {
        for g in jj_area_groups(ds, &params.calibration, params.die)? {
            groups.insert((ds.wafer_id.clone(), (g.cd_be * 1000.0).round() as i64), g.resistances);
        }
        let y = functional_yield(ds).ok();
        yields.push(vec![ds.wafer_id.clone().into(), ds.batch_id.clone().into(), ds.qubit_count().into(), y.map_or(Value::Null, num)]);
    }
    let summary = group_summary(&groups, params.iqr_k)?;
    let mut t = Table::new(&["wafer", "cd_be_nm", "n", "n_rejected", "mean", "median", "q1", "q3", "std", "rsd_pct"]);
    let mut by_cd: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for ((w, cd), s) in &summary {
        t.push(vec![
            w.clone().into(),
            num(*cd as f64 / 1000.0),
            s.n.into(),
            s.n_rejected.into(),
            num(s.mean),
            num(s.median),
            num(s.q1),
            num(s.q3),
            num(s.std),
            num(100.0 * s.std / s.mean),
        ]);
        by_cd.entry(*cd).or_default().push(s.mean);
    }
    rep.tables.insert("wafer_areas".into(), t);
    rep.tables.insert("wafers".into(), yields);
    let mut bt = Table::new(&["cd_be_nm", "n_wafers", "mean_of_means", "wafer_to_wafer_rsd_pct"]);
    for (cd, ms) in &by_cd {
        bt.push(vec![
            num(*cd as f64 / 1000.0),
            ms.len().into(),
            num(mean(ms)),
            rsd(ms).map_or(Value::Null, |v| num(100.0 * v)),
        ]);
    }
    rep.tables.insert("batch".into(), bt);
    rep.scalars.insert("n_wafers".into(), datasets.len() as f64);
    Ok(())
}

fn fig3b(map: &SwapMap, params: &RecipeParams, rep: &mut AnalysisReport, out_dir: Option<&Path>) -> Result<(), CliError> {
    let density = tls_density(map, params.prominence)?;
    rep.scalars.insert("tls_density_per_ghz".into(), density);
    rep.scalars.insert("span_ghz".into(), map.span());
    let seed = params.seed_ghz.unwrap_or_else(|| 0.5 * (map.frequencies[0] + map.frequencies[map.n_freqs() - 1]));
    let track = extract_track(map, seed, params.window_ghz, params.prominence)?;
    rep.scalars.insert("track_coverage".into(), track.coverage());
    let psd = track_psd(&track)?;
    rep.scalars.insert("track_variance_hz2".into(), psd.variance);
    let fit = fit_lorentzian_psd(&psd.freqs, &psd.psd, LorentzianOptions::periodogram())?;
    rep.scalars.insert("tlf_rate_hz".into(), fit.gamma);
    rep.fits.insert("tlf_lorentzian".into(), fit.to_fit_result());
    if let Some(dir) = out_dir {
        let name = "fig3b-track.csv".to_string();
        let file = std::fs::File::create(dir.join(&name)).map_err(|e| CliError::Io(e.to_string()))?;
        track.write_csv(file)?;
        rep.artifacts.push(name);
    }
    Ok(())
}

fn fig2b(ds: &WaferDataset, params: &RecipeParams, rep: &mut AnalysisReport) -> Result<(), CliError> {
    let t1 = all_values(ds, MeasurementKind::T1);
    let designs: BTreeMap<&str, &QubitDesign> = ds.qubits().map(|(_, _, q)| (q.device_id.as_str(), &q.design)).collect();
    // longest series; ties go to the smallest id
    let (id, series) = t1
        .iter()
        .filter(|(id, _)| designs.get(id.as_str()).is_some_and(|d| design_selected(params, d)))
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0)))
        .ok_or_else(|| CliError::Validation("no T1 records".into()))?;
    let values: Vec<f64> = series.iter().map(|x| x.1).collect();
    let g = fit_gaussian(&values)?;
    rep.fits.insert("gaussian".into(), g.to_fit_result());
    rep.scalars.insert("n_samples".into(), values.len() as f64);
    rep.scalars.insert("duration_h".into(), series[series.len() - 1].0 - series[0].0);
    let mut t = Table::new(&["index", "time_h", "magnitude_sigma", "delta_us"]);
    let events = detect_jump(&values, params.jump_window, params.n_sigma)?;
    for e in &events {
        t.push(vec![e.index.into(), num(series[e.index].0), num(e.magnitude), num(e.delta)]);
    }
    rep.scalars.insert("n_jumps".into(), events.len() as f64);
    rep.tables.insert("jumps".into(), t);
    let mut dt = Table::new(&["device_id"]);
    dt.push(vec![id.clone().into()]);
    rep.tables.insert("device".into(), dt);
    Ok(())
}
