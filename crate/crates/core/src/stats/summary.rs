// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::iqr::{iqr_filter, quantile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub n_rejected: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    /// Sample standard deviation of kept values.
    pub std: f64,
}

/// IQR-filters every group independently and summarizes what is kept.
pub fn group_summary<K: Ord + Clone>(
    groups: &BTreeMap<K, Vec<f64>>,
    k: f64,
) -> Result<BTreeMap<K, GroupSummary>> {
    if groups.is_empty() {
        return Err(Error::insufficient("no groups"));
    }
    groups
        .iter()
        .map(|(key, xs)| {
            if xs.is_empty() {
                return Err(Error::insufficient("empty group"));
            }
            let split = iqr_filter(xs, k);
            let mut kept = split.kept;
            kept.sort_by(f64::total_cmp);
            Ok((
                key.clone(),
                GroupSummary {
                    n: kept.len(),
                    n_rejected: split.rejected.len(),
                    mean: super::mean(&kept),
                    min: kept[0],
                    max: kept[kept.len() - 1],
                    q1: quantile(&kept, 0.25),
                    median: quantile(&kept, 0.5),
                    q3: quantile(&kept, 0.75),
                    std: super::sample_std(&kept),
                },
            ))
        })
        .collect()
}
