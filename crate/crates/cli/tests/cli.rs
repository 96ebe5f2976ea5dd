// SPDX-License-Identifier: Apache-2.0

mod common;

use std::process::Command;

use waferqc_cli::{run_recipe, Inputs, Recipe, RecipeParams};
use waferqc_core::bundled::MINI_WAFER_JSON;
use waferqc_core::WaferDataset;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_waferqc"))
}

#[test]
fn help_lists_every_recipe() {
    let out = bin().args(["analyze", "--help"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for r in Recipe::all() {
        assert!(text.contains(r.name()), "{} not in help", r.name());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing input file: I/O
    let s = bin().args(["analyze", "fig4a-rsd", "--dataset", "/nonexistent.json"]).status().unwrap();
    assert_eq!(s.code(), Some(3));
    // unknown recipe: usage error
    let s = bin().args(["analyze", "fig9z"]).status().unwrap();
    assert_eq!(s.code(), Some(1));
    // schema violation
    let mut ds = WaferDataset::from_json_str(MINI_WAFER_JSON).unwrap();
    ds.dies[0].center_radius += 50.0;
    let bad = dir.path().join("bad.json");
    ds.save(&bad).unwrap();
    let s = bin().args(["validate", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(s.status.code(), Some(1));
    let s = bin().args(["analyze", "fig4a-rsd", "--dataset", bad.to_str().unwrap(), "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(s.code(), Some(1));
    // clean run
    let good = dir.path().join("good.json");
    std::fs::write(&good, MINI_WAFER_JSON).unwrap();
    let s = bin().args(["analyze", "fig4a-rsd", "--format", "csv", "--dataset", good.to_str().unwrap(), "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(s.code(), Some(0));
    assert!(dir.path().join("fig4a-rsd.json").exists());
    assert!(dir.path().join("fig4a-rsd-areas.csv").exists());
    let out = bin().args(["report", "--format", "csv"]).arg(dir.path().join("fig4a-rsd.json")).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("model_a.rsd_ra"));
}

#[test]
fn one_die_wafermap_is_insufficient() {
    let mut ds = WaferDataset::from_json_str(MINI_WAFER_JSON).unwrap();
    let keep = ds.dies.iter().position(|d| !d.subdies.iter().all(|s| s.qubits.is_empty())).unwrap();
    ds = WaferDataset { dies: vec![ds.dies[keep].clone()], ..ds };
    let inputs = Inputs::from_bytes(vec![ds.to_json_string().unwrap().into_bytes()], vec![]).unwrap();
    let err = run_recipe(Recipe::Fig2aWafermap, &inputs, &RecipeParams::default(), None).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("insufficient radii"), "{err}");
}

#[test]
fn aging_recipe_needs_two_datasets() {
    let inputs = common::bundled_inputs(Recipe::Fig2aWafermap);
    assert!(run_recipe(Recipe::Fig4bAging, &inputs, &RecipeParams::default(), None).is_err());
}

#[test]
fn simulate_ingest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let designs = dir.path().join("designs.json");
    std::fs::write(&designs, r#"{"subdies": [], "jj_cds": [150.0, 200.0], "jj_per_area": 2}"#).unwrap();
    let s = bin().args(["simulate", "--seed", "3", "--designs"]).arg(&designs).arg("--out").arg(dir.path()).status().unwrap();
    assert!(s.success());
    let ds = WaferDataset::load(dir.path().join("dataset.json")).unwrap();
    assert_eq!(ds.jj_structures().count(), 75 * 4);
    let csv = dir.path().join("jj.csv");
    waferqc_core::export_jj_csv(&ds, std::fs::File::create(&csv).unwrap()).unwrap();
    let out = dir.path().join("ingested.json");
    let s = bin().args(["ingest", "--wafer-id", "W", "--date", "2024-01-15", "--out"]).arg(&out).arg(&csv).status().unwrap();
    assert!(s.success());
    assert_eq!(WaferDataset::load(&out).unwrap().jj_structures().count(), 300);
}
