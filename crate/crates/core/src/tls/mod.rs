// SPDX-License-Identifier: Apache-2.0

//! Swap-spectroscopy analysis: dip detection, defect density, per-defect
//! tracking and telegraph-noise spectra.

mod dips;
mod psd;

pub use dips::{find_dips, Dip};
pub use psd::{periodogram, track_psd, Periodogram};

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PROMINENCE: f64 = 0.15;
/// Narrowest frequency span a density is quoted over, GHz.
pub const MIN_DENSITY_SPAN_GHZ: f64 = 0.1;

/// Residual excited-state population after a fixed hold, versus qubit
/// frequency (GHz) and time (hours). `population` is row-major with one row
/// per timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapMap {
    pub frequencies: Vec<f64>,
    pub timestamps: Vec<f64>,
    pub population: Vec<f64>,
}

impl SwapMap {
    pub fn new(frequencies: Vec<f64>, timestamps: Vec<f64>, population: Vec<f64>) -> Result<Self> {
        let m = Self { frequencies, timestamps, population };
        m.check()?;
        Ok(m)
    }

    pub fn check(&self) -> Result<()> {
        if self.population.len() != self.frequencies.len() * self.timestamps.len() {
            return Err(Error::Invalid(format!(
                "population has {} entries, grids imply {}x{}",
                self.population.len(),
                self.timestamps.len(),
                self.frequencies.len()
            )));
        }
        if self.population.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Invalid("population outside [0, 1]".into()));
        }
        if self.frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("frequency grid not increasing".into()));
        }
        if self.timestamps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("timestamps not increasing".into()));
        }
        Ok(())
    }

    pub fn n_freqs(&self) -> usize {
        self.frequencies.len()
    }

    pub fn n_times(&self) -> usize {
        self.timestamps.len()
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let n = self.n_freqs();
        &self.population[t * n..(t + 1) * n]
    }

    /// GHz
    pub fn span(&self) -> f64 {
        match (self.frequencies.first(), self.frequencies.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Same map with time reversed.
    pub fn time_reversed(&self) -> Self {
        let t_end = self.timestamps.last().copied().unwrap_or(0.0);
        let t0 = self.timestamps.first().copied().unwrap_or(0.0);
        let timestamps = self.timestamps.iter().rev().map(|t| t_end + t0 - t).collect();
        let population = (0..self.n_times()).rev().flat_map(|t| self.row(t).to_vec()).collect();
        Self { frequencies: self.frequencies.clone(), timestamps, population }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s)?;
        m.check()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }
}

/// Dips per GHz, averaged over timestamps.
pub fn tls_density(map: &SwapMap, prominence: f64) -> Result<f64> {
    let span = map.span();
    if !(span >= MIN_DENSITY_SPAN_GHZ) {
        return Err(Error::insufficient(format!(
            "frequency span {span} GHz below {MIN_DENSITY_SPAN_GHZ} GHz"
        )));
    }
    if map.n_times() == 0 {
        return Err(Error::insufficient("map has no timestamps"));
    }
    let total: usize = (0..map.n_times())
        .into_par_iter()
        .map(|t| find_dips(&map.frequencies, map.row(t), prominence).len())
        .sum();
    Ok(total as f64 / map.n_times() as f64 / span)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TlsTrack {
    pub defect_id: String,
    /// hours
    pub timestamps: Vec<f64>,
    /// GHz; `None` where no dip cleared the threshold within the window.
    pub frequencies: Vec<Option<f64>>,
    pub prominences: Vec<Option<f64>>,
}

impl TlsTrack {
    pub fn coverage(&self) -> f64 {
        if self.frequencies.is_empty() {
            return 0.0;
        }
        self.frequencies.iter().filter(|f| f.is_some()).count() as f64 / self.frequencies.len() as f64
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["defect_id", "timestamp_h", "frequency_ghz", "prominence"])?;
        for ((t, f), p) in self.timestamps.iter().zip(&self.frequencies).zip(&self.prominences) {
            let opt = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            wr.write_record([self.defect_id.clone(), t.to_string(), opt(f), opt(p)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Nearest-neighbour tracking: at each timestamp take the most prominent dip
/// within `window` GHz of the last known position.
pub fn extract_track(map: &SwapMap, seed_frequency: f64, window: f64, prominence: f64) -> Result<TlsTrack> {
    let (lo, hi) = match (map.frequencies.first(), map.frequencies.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::insufficient("empty frequency grid")),
    };
    if !(lo..=hi).contains(&seed_frequency) {
        return Err(Error::Invalid(format!("seed {seed_frequency} GHz outside [{lo}, {hi}]")));
    }
    if !(window > 0.0) {
        return Err(Error::Invalid("window must be positive".into()));
    }
    let per_time: Vec<Vec<Dip>> = (0..map.n_times())
        .into_par_iter()
        .map(|t| find_dips(&map.frequencies, map.row(t), prominence))
        .collect();

    let mut pos = seed_frequency;
    let mut frequencies = Vec::with_capacity(map.n_times());
    let mut prominences = Vec::with_capacity(map.n_times());
    for dips in &per_time {
        let best = dips
            .iter()
            .filter(|d| (d.frequency - pos).abs() <= window)
            .max_by(|a, b| {
                a.prominence
                    .total_cmp(&b.prominence)
                    .then((b.frequency - pos).abs().total_cmp(&(a.frequency - pos).abs()))
            });
        match best {
            Some(d) => {
                pos = d.frequency;
                frequencies.push(Some(d.frequency));
                prominences.push(Some(d.prominence));
            }
            None => {
                frequencies.push(None);
                prominences.push(None);
            }
        }
    }
    if frequencies.iter().all(Option::is_none) {
        return Err(Error::NoTrack(format!("no dip within {window} GHz of {seed_frequency} GHz")));
    }
    Ok(TlsTrack {
        defect_id: format!("tls@{seed_frequency:.4}GHz"),
        timestamps: map.timestamps.clone(),
        frequencies,
        prominences,
    })
}
