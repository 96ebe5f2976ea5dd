// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. One line per criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use waferqc_cli::{run_recipe, Inputs, Recipe, RecipeParams};
use waferqc_core::analysis::{jj_area_groups, rsd_points};
use waferqc_core::bundled::{mini_wafer, MINI_WAFER_JSON};
use waferqc_core::designs::{d1_designs, d2_designs, table_i};
use waferqc_core::epr::{participation, InterfaceStack, ParticipationSet};
use waferqc_core::geometry::{estimate_area, CdCalibration};
use waferqc_core::sim::{
    apply_aging, simulate_swap_map, simulate_t1_series, simulate_wafer, DesignSet, RaProfile, SimConfig, SubDieSpec,
    SwapMapSpec, TlsBathConfig,
};
use waferqc_core::stats::{
    crossover_area, detect_jump, fit_gaussian, fit_loss_model, fit_lorentzian_psd, fit_rsd_model, t1_limit_ms,
    LorentzianOptions, RsdModel,
};
use waferqc_core::tls::{extract_track, track_psd, tls_density, DEFAULT_PROMINENCE};
use waferqc_core::transmon::{fqb_from_energies, quality_factor, rsd, scaled_frequency, t1_from_quality_factor};
use waferqc_core::{functional_yield, Ghz, GridPosition as Pos, MeasurementKind, Mhz, WaferDataset};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn rel(x: f64, want: f64) -> f64 {
    (x / want - 1.0).abs()
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn c1_table_i() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in table_i() {
        let f = fqb_from_energies(Ghz(d.e_j_target), Mhz(d.e_c)).map_err(e)?.0;
        worst = worst.max((f - d.f_qb_target).abs() * 1e3);
    }
    check(worst < 10.0, format!("15 rows, worst |Δf| = {worst:.2} MHz"))
}

fn c2_loss_model() -> Outcome {
    let limit = t1_limit_ms(1.77e-7).ok_or("no limit")?;
    if rel(limit, 0.30) >= 0.01 {
        return Err(format!("t1 limit {limit:.4} ms"));
    }
    let (d0, dt) = (1.77e-7, 2.9e-3);
    let stack = InterfaceStack::default();
    let mut geoms: Vec<(f64, f64)> = d1_designs().iter().map(|d| (d.cap_width, d.cap_gap)).collect();
    geoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    geoms.dedup();
    assert_eq!(geoms.len(), 4);
    let ps: Vec<f64> = geoms.iter().map(|&(w, g)| participation(w, g, &stack).map(|p| p.p_total)).collect::<Result<_, _>>().map_err(e)?;
    let f = Ghz(4.0);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut ok = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::new();
        for &p in &ps {
            let t1 = t1_from_quality_factor(1.0 / (d0 + dt * p), f).map_err(e)?;
            for _ in 0..30 {
                let t = t1 * (1.0 + noise.sample(&mut rng));
                pts.push((p, 1.0 / quality_factor(t, f).map_err(e)?));
            }
        }
        let fit = fit_loss_model(&pts).map_err(e)?;
        if (fit.delta_0 - d0).abs() < 3.0 * fit.se_delta_0 && (fit.delta_t - dt).abs() < 3.0 * fit.se_delta_t {
            ok += 1;
        }
    }
    check(ok >= 18, format!("t1 limit {limit:.4} ms; {ok}/20 seeds within 3 SE"))
}

fn c3_rsd() -> Outcome {
    let mut crossovers = Vec::new();
    let mut first = String::new();
    let mut seed1_ok = false;
    for seed in 0..20 {
        let cfg = SimConfig { seed, dies: Some(vec![Pos(0, 0)]), t1_series: None, ..SimConfig::default() };
        let (ds, _) = simulate_wafer(&cfg, &DesignSet::jj_only(146)).map_err(e)?;
        let groups = jj_area_groups(&ds, &cfg.cd_offsets, None).map_err(e)?;
        let fit = fit_rsd_model(&rsd_points(&groups, 2), RsdModel::A).map_err(e)?;
        if seed == 1 {
            seed1_ok = rel(fit.rsd_ra, 4.47) < 0.15 && rel(fit.sigma, 0.00334) < 0.15;
            first = format!("seed 1: rsd_ra {:.2}%, σ_A {:.5}", fit.rsd_ra, fit.sigma);
        }
        crossovers.push(crossover_area(&fit).map_err(e)?.area);
    }
    let m = median(crossovers);
    check(seed1_ok && rel(m, 0.075) < 0.1, format!("{first}; crossover median {m:.4} μm²"))
}

fn c4_halving() -> Outcome {
    let cfg = SimConfig {
        sigma_area: 0.0,
        ra_profile: RaProfile::flat(300.0),
        rsd_ra_local: 7.0,
        yield_loss_prob: 0.0,
        t1_series: None,
        ..SimConfig::default()
    };
    let set = DesignSet {
        subdies: vec![SubDieSpec { name: "D2".into(), designs: d2_designs(), n_dies: 75 }],
        jj_per_area: 1,
        ..DesignSet::default()
    };
    let (ds, _) = simulate_wafer(&cfg, &set).map_err(e)?;
    let rn = ds.measurements_by_device(MeasurementKind::NormalResistance);
    let fq = ds.measurements_by_device(MeasurementKind::QubitFrequency);
    let mut worst: f64 = 0.0;
    let mut per: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (_, _, q) in ds.qubits() {
        if q.design.has_squid {
            continue;
        }
        let (Some(r), Some(f)) = (
            rn.get(q.device_id.as_str()).and_then(|m| m[0].valid_scalar()),
            fq.get(q.device_id.as_str()).and_then(|m| m[0].valid_scalar()),
        ) else {
            continue;
        };
        let entry = per.entry(q.design.name.clone()).or_default();
        entry.0.push(r);
        entry.1.push(f + q.design.e_c * 1e-3);
    }
    for (rs, fs) in per.values() {
        let half = 50.0 * rsd(rs).ok_or("rsd")?;
        worst = worst.max((100.0 * rsd(fs).ok_or("rsd")? - half).abs());
    }
    check(per.len() == 9 && worst < 0.2, format!("{} designs, worst |RSD(f+E_C) − RSD(R_n)/2| = {worst:.3} pp", per.len()))
}

fn c5_tls() -> Outcome {
    let bath = TlsBathConfig::swap_spectroscopy();
    let spec = SwapMapSpec::default();
    let mut gammas = Vec::new();
    let mut density1 = f64::NAN;
    for seed in 0..20 {
        let map = simulate_swap_map(&bath, &spec, seed).map_err(e)?;
        if seed == 1 {
            density1 = tls_density(&map, DEFAULT_PROMINENCE).map_err(e)?;
        }
        let track = extract_track(&map, spec.center_ghz, 0.008, DEFAULT_PROMINENCE).map_err(e)?;
        let psd = track_psd(&track).map_err(e)?;
        let fit = fit_lorentzian_psd(&psd.freqs, &psd.psd, LorentzianOptions::periodogram()).map_err(e)?;
        gammas.push(fit.gamma);
    }
    let g = median(gammas);
    check(
        rel(density1, 34.0) < 0.15 && rel(g, 0.241e-3) < 0.25,
        format!("density {density1:.1}/GHz; TLF rate median {:.3} mHz", g * 1e3),
    )
}

fn c6_temporal() -> Outcome {
    let s = simulate_t1_series(&TlsBathConfig::fluctuating(), 4.0, 60.0, 10.0, 1).map_err(e)?;
    let g = fit_gaussian(&s.t1_us).map_err(e)?;
    let gauss_ok = rel(g.mu, 75.0) < 0.2 && rel(g.sigma, 20.0) < 0.2;
    let mut ok = 0;
    for seed in 0..20 {
        let s = simulate_t1_series(&TlsBathConfig::removal(45.0), 4.0, 60.0, 10.0, seed).map_err(e)?;
        if detect_jump(&s.t1_us, 20, 6.0).map_err(e)?.len() == 1 {
            ok += 1;
        }
    }
    check(gauss_ok && ok >= 18, format!("μ {:.1} μs, σ {:.1} μs; single jump in {ok}/20 seeds", g.mu, g.sigma))
}

fn c7_aging() -> Outcome {
    let (ds, truth) = simulate_wafer(&SimConfig::default(), &DesignSet::default()).map_err(e)?;
    let aged = apply_aging(&ds, &truth, 146.0).map_err(e)?;
    let mean_rn = |d: &WaferDataset| {
        let v: Vec<f64> = d
            .measurements()
            .filter(|(_, _, m)| m.kind == MeasurementKind::NormalResistance)
            .filter_map(|(_, _, m)| m.valid_scalar())
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let change = 100.0 * (mean_rn(&aged) / mean_rn(&ds) - 1.0);
    let before = ds.measurements_by_device(MeasurementKind::QubitFrequency);
    let after = aged.measurements_by_device(MeasurementKind::QubitFrequency);
    let mut up = 0;
    for (id, ms) in &before {
        let a = truth.devices[*id].total_area();
        let s0 = scaled_frequency(Ghz(ms[0].valid_scalar().unwrap()), a).map_err(e)?;
        let s1 = scaled_frequency(Ghz(after[id][0].valid_scalar().unwrap()), a).map_err(e)?;
        up += usize::from(s1 > s0);
    }
    check(
        (change + 3.7).abs() <= 0.1 && up == before.len(),
        format!("mean R_n {change:+.3}%; scaled frequency up for {up}/{}", before.len()),
    )
}

/// Half the circumference of an ellipse, composite Simpson on the
/// complete elliptic integral of the second kind.
fn half_arc_oracle(a: f64, b: f64) -> f64 {
    let (major, minor) = if a >= b { (a, b) } else { (b, a) };
    let m = 1.0 - (minor / major).powi(2);
    let n = 20_000;
    let h = 0.5 * PI / n as f64;
    let f = |t: f64| (1.0 - m * t.sin().powi(2)).sqrt();
    let mut s = f(0.0) + f(0.5 * PI);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * major * s * h / 3.0
}

fn c8_geometry() -> Outcome {
    let (be, te) = (200.0, 180.0);
    let mut worst: f64 = 0.0;
    for i in 0..=95 {
        let ratio = 0.05 + 0.01 * i as f64;
        let cal = CdCalibration { h_be: ratio * be / 2.0, ..CdCalibration::default() };
        let area = estimate_area(be, te, &cal).map_err(e)?;
        let want = te * half_arc_oracle(be / 2.0, cal.h_be) * 1e-6;
        worst = worst.max(rel(area, want));
    }
    let flat = estimate_area(be, te, &CdCalibration { h_be: 1e-9, ..CdCalibration::default() }).map_err(e)?;
    let round = estimate_area(be, te, &CdCalibration { h_be: be / 2.0, ..CdCalibration::default() }).map_err(e)?;
    let limits = rel(flat, be * te * 1e-6) < 5e-3 && rel(round, PI * be / 2.0 * te * 1e-6) < 1e-4;
    check(worst < 1e-4 && limits, format!("worst relative error {worst:.2e}; flat and circular limits hold: {limits}"))
}

fn c9_epr() -> Outcome {
    let stack = InterfaceStack::default();
    let p = |w: f64, g: f64| participation(w, g, &stack).map_err(e);
    let ratio = p(13.0, 13.0)?.p_total / p(90.0, 90.0)?.p_total;
    let mut spread: f64 = 0.0;
    let mut scale_worst: f64 = 0.0;
    let geoms = [13.0, 24.0, 48.0, 90.0];
    let sets: Vec<_> = geoms.iter().map(|&w| p(w, w)).collect::<Result<_, _>>()?;
    let pairs: [fn(&ParticipationSet) -> f64; 3] = [|s| s.p_sa / s.p_sm, |s| s.p_sm / s.p_ma, |s| s.p_sa / s.p_ma];
    for pair in pairs {
        let v: Vec<f64> = sets.iter().map(pair).collect();
        let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
        spread = spread.max(hi / lo - 1.0);
    }
    for (&w, s) in geoms.iter().zip(&sets) {
        let d = p(2.0 * w, 2.0 * w)?;
        for (a, b) in [(d.p_sa, s.p_sa), (d.p_sm, s.p_sm), (d.p_ma, s.p_ma)] {
            scale_worst = scale_worst.max(rel(a, 0.5 * b));
        }
    }
    check(
        (4.5..=7.5).contains(&ratio) && spread < 0.1 && scale_worst < 0.01,
        format!("p(13)/p(90) = {ratio:.2}; ratio spread {:.1}%; 1/scale error {:.2}%", spread * 100.0, scale_worst * 100.0),
    )
}

fn run_pipeline(dir: &Path, threads: &str) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_waferqc");
    let run = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(bin).args(args).env("WAFERQC_THREADS", threads).output().map_err(e)?;
        if out.status.success() {
            Ok(())
        } else {
            Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
        }
    };
    let d = dir.to_str().unwrap();
    run(&["simulate", "--seed", "11", "--swap-map", "--aging-days", "146", "--out", d])?;
    let ds = dir.join("dataset.json");
    let aged = dir.join("dataset_aged.json");
    let map = dir.join("swap_map.json");
    let (ds, aged, map) = (ds.to_str().unwrap(), aged.to_str().unwrap(), map.to_str().unwrap());
    let reports = dir.join("reports");
    let out = reports.to_str().unwrap();
    for r in Recipe::all() {
        let mut args = vec!["analyze", r.name(), "--out", out];
        match r {
            Recipe::Fig3bTls => args.extend(["--swap-map", map]),
            Recipe::Fig4bAging | Recipe::Supp7Batch => args.extend(["--dataset", ds, "--dataset", aged]),
            _ => args.extend(["--dataset", ds]),
        }
        run(&args)?;
    }
    Ok(())
}

fn read_tree(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(e)? {
        let p = entry.map_err(e)?.path();
        out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).map_err(e)?);
    }
    Ok(out)
}

fn c10_determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(e)?;
    let b = tempfile::tempdir().map_err(e)?;
    run_pipeline(a.path(), "1")?;
    run_pipeline(b.path(), "8")?;
    let (ta, tb) = (read_tree(&a.path().join("reports"))?, read_tree(&b.path().join("reports"))?);
    let same_data = std::fs::read(a.path().join("dataset.json")).map_err(e)? == std::fs::read(b.path().join("dataset.json")).map_err(e)?;
    let n_reports = ta.keys().filter(|k| k.ends_with(".json")).count();
    let n_svg = ta.keys().filter(|k| k.ends_with(".svg")).count();
    let diff: Vec<&String> = ta.keys().filter(|k| ta.get(*k) != tb.get(*k)).collect();
    check(
        same_data && diff.is_empty() && ta.len() == tb.len() && n_reports == 8 && n_svg == 2,
        format!("{n_reports} reports, {n_svg} SVGs, {} files compared; differing: {diff:?}", ta.len()),
    )
}

fn c11_yield() -> Outcome {
    let y = functional_yield(&mini_wafer().map_err(e)?).map_err(e)?;
    let inputs = Inputs::from_bytes(vec![MINI_WAFER_JSON.as_bytes().to_vec()], vec![]).map_err(e)?;
    let rep = run_recipe(Recipe::Supp7Batch, &inputs, &RecipeParams::default(), None).map_err(e)?;
    let table = &rep.tables["wafers"];
    let col = table.columns.iter().position(|c| c == "functional_yield").ok_or("no yield column")?;
    let reported = table.rows[0][col].as_f64().ok_or("yield not numeric")?;
    let shown = format!("{:.1}%", 100.0 * reported);
    check(y == 0.985 && shown == "98.5%", format!("yield {shown} ({} qubits)", table.rows[0][2]))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Table I frequencies", c1_table_i),
        ("loss-model extrapolation and recovery", c2_loss_model),
        ("RSD disentanglement", c3_rsd),
        ("frequency RSD is half the resistance RSD", c4_halving),
        ("TLS density and fluctuator rate", c5_tls),
        ("T1 statistics and jump detection", c6_temporal),
        ("aging", c7_aging),
        ("junction geometry", c8_geometry),
        ("participation ratios", c9_epr),
        ("determinism across thread counts", c10_determinism),
        ("bundled wafer yield", c11_yield),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = f();
        let dt: Duration = t0.elapsed();
        match res {
            Ok(d) => println!("PASS #{} {name}: {d} ({:.2}s)", i + 1, dt.as_secs_f64()),
            Err(d) => {
                failed += 1;
                println!("FAIL #{} {name}: {d} ({:.2}s)", i + 1, dt.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
