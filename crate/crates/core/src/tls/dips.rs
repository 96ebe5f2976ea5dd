// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub index: usize,
    /// GHz
    pub frequency: f64,
    pub prominence: f64,
}

/// Local maxima of `x` excluding the end points. A flat top counts once, at
/// its middle sample (lower middle for even widths).
fn local_maxima(x: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead + 1 < n && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                peaks.push((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    peaks
}

/// Topographic prominence of the maximum at `peak`: on each side walk out
/// until strictly higher ground (or the edge), tracking the lowest point; the
/// higher of the two side minima is the key col.
fn prominence(x: &[f64], peak: usize) -> f64 {
    let h = x[peak];
    let mut left_min = h;
    for &v in x[..=peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[peak..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Dips of a population slice with prominence at least `threshold`, sorted
/// by frequency. Slices shorter than five samples yield nothing.
pub fn find_dips(frequencies: &[f64], slice: &[f64], threshold: f64) -> Vec<Dip> {
    debug_assert_eq!(frequencies.len(), slice.len());
    if slice.len() < 5 || !(threshold > 0.0) {
        return Vec::new();
    }
    let neg: Vec<f64> = slice.iter().map(|v| -v).collect();
    let mut dips: Vec<Dip> = local_maxima(&neg)
        .into_iter()
        .map(|i| Dip { index: i, frequency: frequencies[i], prominence: prominence(&neg, i) })
        .filter(|d| d.prominence >= threshold)
        .collect();
    dips.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    dips
}
