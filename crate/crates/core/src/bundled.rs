// SPDX-License-Identifier: Apache-2.0

//! Small simulated inputs shipped with the library (regenerate with the
//! `make_bundled` example).

use crate::dataset::WaferDataset;
use crate::error::Result;
use crate::tls::SwapMap;

/// 75 dies, 400 qubits of which 394 are functional, one JJ per area per die.
pub const MINI_WAFER_JSON: &str = include_str!("../data/mini_wafer.json");
/// The same wafer re-measured 146 days later.
pub const MINI_WAFER_AGED_JSON: &str = include_str!("../data/mini_wafer_146d.json");
/// 0.25 GHz × 13 h swap map with nine planted defects.
pub const MINI_SWAP_MAP_JSON: &str = include_str!("../data/mini_swap_map.json");

pub fn mini_wafer() -> Result<WaferDataset> {
    WaferDataset::from_json_str(MINI_WAFER_JSON)
}

pub fn mini_wafer_aged() -> Result<WaferDataset> {
    WaferDataset::from_json_str(MINI_WAFER_AGED_JSON)
}

pub fn mini_swap_map() -> Result<SwapMap> {
    SwapMap::from_json_str(MINI_SWAP_MAP_JSON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{functional_yield, validate_dataset};

    #[test]
    fn mini_wafer_is_valid_with_expected_yield() {
        let ds = mini_wafer().unwrap();
        assert!(validate_dataset(&ds).is_empty());
        assert_eq!(ds.qubit_count(), 400);
        assert!((functional_yield(&ds).unwrap() - 0.985).abs() < 1e-12);
        assert!(validate_dataset(&mini_wafer_aged().unwrap()).is_empty());
        assert_eq!(mini_swap_map().unwrap().n_freqs(), 251);
    }
}
