// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    /// First index of the post-jump window.
    pub index: usize,
    /// `|Δmean|` in units of the pre-jump window's standard deviation.
    pub magnitude: f64,
    /// Signed `mean(next) − mean(prev)`.
    pub delta: f64,
}

/// Sliding two-window mean-shift detector.
///
/// Every boundary `i` compares `series[i-w..i]` with `series[i..i+w]`. Each
/// contiguous run of boundaries over threshold yields one event at its
/// strongest point; the next search starts a full window later.
pub fn detect_jump(series: &[f64], window: usize, n_sigma: f64) -> Result<Vec<JumpEvent>> {
    if window < 5 {
        return Err(Error::Invalid(format!("window {window} < 5")));
    }
    if series.len() < 2 * window {
        return Err(Error::insufficient(format!(
            "series of {} shorter than two windows of {window}",
            series.len()
        )));
    }
    if !(n_sigma > 0.0) {
        return Err(Error::Invalid("n_sigma must be positive".into()));
    }

    let score = |i: usize| {
        let prev = &series[i - window..i];
        let next = &series[i..i + window];
        let delta = super::mean(next) - super::mean(prev);
        let m = super::mean(prev);
        let sd = super::sample_std(prev).max(f64::EPSILON * m.abs().max(1.0));
        (delta, delta.abs() / sd)
    };

    let last = series.len() - window;
    let mut events = Vec::new();
    let mut i = window;
    while i <= last {
        let (_, z) = score(i);
        if z <= n_sigma {
            i += 1;
            continue;
        }
        let mut best = (i, score(i));
        let mut j = i + 1;
        while j <= last {
            let s = score(j);
            if s.1 <= n_sigma {
                break;
            }
            if s.1 > best.1 .1 {
                best = (j, s);
            }
            j += 1;
        }
        events.push(JumpEvent { index: best.0, magnitude: best.1 .1, delta: best.1 .0 });
        i = j.max(best.0 + window);
    }
    Ok(events)
}
