// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

/// Linear-interpolation quantile of sorted data (the numpy default).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IqrSplit {
    pub kept: Vec<f64>,
    pub rejected: Vec<f64>,
    pub lower_fence: f64,
    pub upper_fence: f64,
    /// Fewer than four samples: nothing was filtered.
    pub too_few: bool,
}

/// Keeps `Q1 − k·IQR ≤ x ≤ Q3 + k·IQR`. Input order is preserved in both
/// halves.
pub fn iqr_filter(samples: &[f64], k: f64) -> IqrSplit {
    if samples.len() < 4 {
        return IqrSplit {
            kept: samples.to_vec(),
            rejected: Vec::new(),
            lower_fence: f64::NEG_INFINITY,
            upper_fence: f64::INFINITY,
            too_few: true,
        };
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lower_fence, upper_fence) = if k.is_infinite() {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        (q1 - k * iqr, q3 + k * iqr)
    };
    let (kept, rejected) = samples
        .iter()
        .partition(|&&x| x >= lower_fence && x <= upper_fence);
    IqrSplit {
        kept,
        rejected,
        lower_fence,
        upper_fence,
        too_few: false,
    }
}
