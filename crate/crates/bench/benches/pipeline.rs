// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use waferqc_core::analysis::{jj_area_groups, rsd_points};
use waferqc_core::sim::{simulate_swap_map, simulate_wafer, DesignSet, SimConfig, SwapMapSpec, TlsBathConfig};
use waferqc_core::stats::{fit_lorentzian_psd, fit_rsd_model, LorentzianOptions, RsdModel};
use waferqc_core::tls::{extract_track, tls_density, track_psd, DEFAULT_PROMINENCE};

fn simulate(c: &mut Criterion) {
    let cfg = SimConfig::default();
    let set = DesignSet::default();
    c.bench_function("simulate_wafer/default", |b| b.iter(|| simulate_wafer(black_box(&cfg), &set).unwrap()));
}

fn rsd_fit(c: &mut Criterion) {
    let cfg = SimConfig::default();
    let (ds, _) = simulate_wafer(&cfg, &DesignSet::jj_only(8)).unwrap();
    let points = rsd_points(&jj_area_groups(&ds, &cfg.cd_offsets, None).unwrap(), 2);
    c.bench_function("jj_area_groups", |b| b.iter(|| jj_area_groups(black_box(&ds), &cfg.cd_offsets, None).unwrap()));
    c.bench_function("fit_rsd_model/A", |b| b.iter(|| fit_rsd_model(black_box(&points), RsdModel::A).unwrap()));
}

fn tls(c: &mut Criterion) {
    let spec = SwapMapSpec::default();
    let map = simulate_swap_map(&TlsBathConfig::swap_spectroscopy(), &spec, 1).unwrap();
    let psd = track_psd(&extract_track(&map, spec.center_ghz, 0.008, DEFAULT_PROMINENCE).unwrap()).unwrap();
    c.bench_function("tls_density", |b| b.iter(|| tls_density(black_box(&map), DEFAULT_PROMINENCE).unwrap()));
    c.bench_function("fit_lorentzian_psd", |b| {
        b.iter(|| fit_lorentzian_psd(black_box(&psd.freqs), &psd.psd, LorentzianOptions::periodogram()).unwrap())
    });
}

criterion_group!(benches, simulate, rsd_fit, tls);
criterion_main!(benches);
