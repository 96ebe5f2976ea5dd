// SPDX-License-Identifier: Apache-2.0

use waferqc_cli::{Inputs, Recipe};
use waferqc_core::bundled::{MINI_SWAP_MAP_JSON, MINI_WAFER_AGED_JSON, MINI_WAFER_JSON};

/// Bundled inputs for a recipe: the aging and batch recipes get both
/// measurements of the mini wafer.
#[allow(dead_code)]
pub fn bundled_inputs(recipe: Recipe) -> Inputs {
    let one = || vec![MINI_WAFER_JSON.as_bytes().to_vec()];
    let two = || vec![MINI_WAFER_JSON.as_bytes().to_vec(), MINI_WAFER_AGED_JSON.as_bytes().to_vec()];
    let (ds, maps) = match recipe {
        Recipe::Fig3bTls => (vec![], vec![MINI_SWAP_MAP_JSON.as_bytes().to_vec()]),
        Recipe::Fig4bAging | Recipe::Supp7Batch => (two(), vec![]),
        _ => (one(), vec![]),
    };
    Inputs::from_bytes(ds, maps).expect("bundled inputs parse")
}
