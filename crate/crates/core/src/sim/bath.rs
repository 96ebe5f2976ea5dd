// SPDX-License-Identifier: Apache-2.0

//! TLS defect bath: Lorentzian loss per defect, detuning telegraph-switched
//! by a slow fluctuator.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tls::SwapMap;

/// One defect. Detunings are relative to the reference frequency the bath is
/// evaluated around (the qubit for T1 series, the map centre for swap maps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TlsDefect {
    pub detuning_mhz: f64,
    /// Peak loss tangent contribution at resonance.
    pub loss: f64,
    /// Lorentzian half width, MHz.
    pub linewidth_mhz: f64,
    /// Symmetric switching rate of the coupled fluctuator, Hz.
    pub tlf_rate_hz: f64,
    /// Detuning offset in the fluctuator's upper state, MHz.
    pub tlf_shift_mhz: f64,
    /// Hours after which the defect no longer couples to the qubit.
    #[serde(default)]
    pub removed_at_h: Option<f64>,
}

impl TlsDefect {
    fn loss_at(&self, offset_mhz: f64, state: bool) -> f64 {
        let d = offset_mhz - self.detuning_mhz - if state { self.tlf_shift_mhz } else { 0.0 };
        self.loss / (1.0 + (d / self.linewidth_mhz).powi(2))
    }

    fn removed(&self, t_h: f64) -> bool {
        self.removed_at_h.is_some_and(|r| t_h >= r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TlsBathConfig {
    /// Frequency-independent background loss.
    pub delta_0: f64,
    /// Randomly placed defects, in addition to `defects`.
    #[serde(default)]
    pub n_tls: usize,
    #[serde(default)]
    pub coupling_loss: f64,
    #[serde(default = "default_linewidth")]
    pub linewidth_mhz: f64,
    /// Detuning interval for random defects, GHz.
    #[serde(default = "default_detuning_range")]
    pub detuning_range_ghz: [f64; 2],
    /// Log-uniform switching-rate interval for random defects, Hz.
    #[serde(default = "default_rates")]
    pub tlf_rate_hz: [f64; 2],
    #[serde(default)]
    pub tlf_shift_mhz: f64,
    /// Minimum separation between any two defects, MHz.
    #[serde(default)]
    pub min_spacing_mhz: f64,
    #[serde(default)]
    pub defects: Vec<TlsDefect>,
}

fn default_linewidth() -> f64 {
    1.0
}
fn default_detuning_range() -> [f64; 2] {
    [-0.25, 0.25]
}
fn default_rates() -> [f64; 2] {
    [1e-5, 1e-3]
}

impl Default for TlsBathConfig {
    fn default() -> Self {
        Self::fluctuating()
    }
}

impl TlsBathConfig {
    /// Background loss only.
    pub fn quiet(delta_0: f64) -> Self {
        Self {
            delta_0,
            n_tls: 0,
            coupling_loss: 0.0,
            linewidth_mhz: default_linewidth(),
            detuning_range_ghz: default_detuning_range(),
            tlf_rate_hz: default_rates(),
            tlf_shift_mhz: 0.0,
            min_spacing_mhz: 0.0,
            defects: Vec::new(),
        }
    }

    /// Six defects each toggling between resonance and ten linewidths away
    /// on a 0.1–1 h timescale. At 4 GHz: ⟨T1⟩ ≈ 75 μs, σ ≈ 20 μs.
    pub fn fluctuating() -> Self {
        let d = TlsDefect {
            detuning_mhz: 0.0,
            loss: 1.042e-7,
            linewidth_mhz: 1.0,
            tlf_rate_hz: 0.0,
            tlf_shift_mhz: 10.0,
            removed_at_h: None,
        };
        let rates = [2.0e-4, 3.5e-4, 5.0e-4, 7.0e-4, 1.0e-3, 1.5e-3];
        Self {
            defects: rates.iter().map(|&r| TlsDefect { tlf_rate_hz: r, ..d.clone() }).collect(),
            ..Self::quiet(2.499e-7)
        }
    }

    /// Weak fast fluctuators (uncorrelated sample to sample at 10 min
    /// spacing) plus one strong resonant defect that decouples at `at_h`.
    pub fn removal(at_h: f64) -> Self {
        let weak = TlsDefect {
            detuning_mhz: 0.0,
            loss: 1e-8,
            linewidth_mhz: 1.0,
            tlf_rate_hz: 0.1,
            tlf_shift_mhz: 10.0,
            removed_at_h: None,
        };
        let mut defects = vec![weak; 6];
        defects.push(TlsDefect {
            loss: 2.5e-7,
            tlf_rate_hz: 1e-6,
            tlf_shift_mhz: 0.0,
            removed_at_h: Some(at_h),
            ..defects[0].clone()
        });
        Self { defects, ..Self::quiet(2.5e-7) }
    }

    /// Swap-spectroscopy bath for a 0.5 GHz window: 16 random defects at
    /// ≥ 20 MHz spacing plus one at the centre whose fluctuator switches at
    /// 0.241 mHz.
    pub fn swap_spectroscopy() -> Self {
        Self {
            delta_0: 5e-7,
            n_tls: 16,
            coupling_loss: 4e-6,
            linewidth_mhz: 1.5,
            detuning_range_ghz: [-0.24, 0.24],
            tlf_rate_hz: [1e-5, 1e-3],
            tlf_shift_mhz: 4.0,
            min_spacing_mhz: 20.0,
            defects: vec![TlsDefect {
                detuning_mhz: 0.0,
                loss: 4e-6,
                linewidth_mhz: 1.5,
                tlf_rate_hz: 0.241e-3,
                tlf_shift_mhz: 4.0,
                removed_at_h: None,
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.delta_0 >= 0.0 && self.delta_0.is_finite()) {
            return bad("delta_0 must be finite and nonnegative");
        }
        if self.n_tls > 0 {
            let [lo, hi] = self.tlf_rate_hz;
            if !(lo > 0.0 && hi >= lo) {
                return bad("tlf_rate_hz must be a positive interval");
            }
            if !(self.detuning_range_ghz[1] >= self.detuning_range_ghz[0]) {
                return bad("detuning_range_ghz is reversed");
            }
            if !(self.coupling_loss >= 0.0 && self.linewidth_mhz > 0.0) {
                return bad("coupling_loss must be nonnegative and linewidth positive");
            }
        }
        for d in &self.defects {
            if !(d.loss >= 0.0 && d.linewidth_mhz > 0.0 && d.tlf_rate_hz > 0.0) {
                return bad("defects need nonnegative loss, positive linewidth and rate");
            }
        }
        if !(self.min_spacing_mhz >= 0.0) {
            return bad("min_spacing_mhz must be nonnegative");
        }
        Ok(())
    }

    /// Explicit defects followed by the random draws.
    pub fn realize(&self, rng: &mut ChaCha8Rng) -> Result<Vec<TlsDefect>> {
        self.validate()?;
        let mut out = self.defects.clone();
        let [lo, hi] = self.detuning_range_ghz.map(|g| g * 1e3);
        let [rlo, rhi] = self.tlf_rate_hz.map(f64::ln);
        let s = self.min_spacing_mhz;
        // Free segments of the range once the fixed defects are cut out.
        let mut fixed: Vec<f64> = out.iter().map(|d| d.detuning_mhz).collect();
        fixed.sort_by(f64::total_cmp);
        let mut segments = Vec::new();
        let mut start = lo;
        for x in fixed.iter().chain(std::iter::once(&f64::INFINITY)) {
            let end = if x.is_finite() { (x - s).min(hi) } else { hi };
            if end >= start {
                segments.push((start, end));
            }
            start = start.max(x + s);
        }
        // n sorted uniforms on the concatenated segments with the spacing
        // removed, then re-inserted: uniform over all valid placements.
        let n = self.n_tls;
        let total: f64 = segments.iter().map(|(a, b)| b - a).sum();
        let slack = total - n.saturating_sub(1) as f64 * s;
        if n > 0 && (segments.is_empty() || slack < 0.0) {
            return Err(Error::Config(format!("cannot place {n} defects {s} MHz apart")));
        }
        let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=slack.max(0.0))).collect();
        u.sort_by(f64::total_cmp);
        for (j, v) in u.into_iter().enumerate() {
            let mut c = v + j as f64 * s;
            let mut x = segments.last().map_or(lo, |seg| seg.1);
            for &(a, b) in &segments {
                if c <= b - a {
                    x = a + c;
                    break;
                }
                c -= b - a;
            }
            let rate = if rhi > rlo { rng.random_range(rlo..rhi) } else { rlo }.exp();
            out.push(TlsDefect {
                detuning_mhz: x,
                loss: self.coupling_loss,
                linewidth_mhz: self.linewidth_mhz,
                tlf_rate_hz: rate,
                tlf_shift_mhz: self.tlf_shift_mhz,
                removed_at_h: None,
            });
        }
        Ok(out)
    }
}

/// Fluctuator states of every defect at the given (increasing) times, in
/// hours; exact two-state Markov transitions between samples.
fn telegraph_states(defects: &[TlsDefect], times_h: &[f64], rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    defects
        .iter()
        .map(|d| {
            let mut s = rng.random_bool(0.5);
            let mut prev = times_h.first().copied().unwrap_or(0.0);
            times_h
                .iter()
                .map(|&t| {
                    let dt = (t - prev) * 3600.0;
                    prev = t;
                    if rng.random_bool(0.5 * (1.0 - (-2.0 * d.tlf_rate_hz * dt).exp())) {
                        s = !s;
                    }
                    s
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T1Series {
    pub times_h: Vec<f64>,
    pub t1_us: Vec<f64>,
}

/// T1 sampled every `interval_min` over `duration_h`, for a qubit at
/// `f_qb` GHz coupled to the bath (detunings relative to `f_qb`).
pub fn simulate_t1_series(
    cfg: &TlsBathConfig,
    f_qb: f64,
    duration_h: f64,
    interval_min: f64,
    seed: u64,
) -> Result<T1Series> {
    if !(f_qb > 0.0) {
        return Err(Error::domain("qubit frequency must be positive"));
    }
    if !(interval_min > 0.0 && duration_h * 60.0 >= 10.0 * interval_min) {
        return Err(Error::Invalid("duration must cover at least ten intervals".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let defects = cfg.realize(&mut rng)?;
    let n = (duration_h * 60.0 / interval_min + 1e-9).floor() as usize + 1;
    let times_h: Vec<f64> = (0..n).map(|k| k as f64 * interval_min / 60.0).collect();
    let states = telegraph_states(&defects, &times_h, &mut rng);
    let t1_us = times_h
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let delta: f64 = cfg.delta_0
                + defects
                    .iter()
                    .zip(&states)
                    .filter(|(d, _)| !d.removed(t))
                    .map(|(d, s)| d.loss_at(0.0, s[k]))
                    .sum::<f64>();
            1e6 / (2.0 * PI * f_qb * 1e9 * delta)
        })
        .collect();
    Ok(T1Series { times_h, t1_us })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapMapSpec {
    pub center_ghz: f64,
    pub span_ghz: f64,
    pub n_freqs: usize,
    pub duration_h: f64,
    pub n_times: usize,
    pub hold_us: f64,
    /// Gaussian readout noise on the population, absolute.
    pub readout_noise: f64,
}

impl Default for SwapMapSpec {
    /// 0.5 GHz at 1 MHz steps, 13 h at 3 min steps, 8 μs hold.
    fn default() -> Self {
        Self {
            center_ghz: 4.0,
            span_ghz: 0.5,
            n_freqs: 501,
            duration_h: 13.0,
            n_times: 261,
            hold_us: 8.0,
            readout_noise: 0.01,
        }
    }
}

/// Excited-state population `exp(−hold·Γ(f, t))` over the frequency window,
/// `Γ = 2πf·(δ₀ + Σ Lᵢ(f, t))`.
pub fn simulate_swap_map(cfg: &TlsBathConfig, spec: &SwapMapSpec, seed: u64) -> Result<SwapMap> {
    if !(spec.span_ghz > 0.0) || spec.n_freqs < 2 || spec.n_times < 1 {
        return Err(Error::Invalid("swap map needs a positive span and grid".into()));
    }
    if !(spec.duration_h >= 0.0 && spec.hold_us >= 0.0 && spec.readout_noise >= 0.0) {
        return Err(Error::Invalid("duration, hold and noise must be nonnegative".into()));
    }
    if spec.n_times > 1 && !(spec.duration_h > 0.0) {
        return Err(Error::Invalid("several timestamps need a positive duration".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let defects = cfg.realize(&mut rng)?;
    let lo = spec.center_ghz - 0.5 * spec.span_ghz;
    let freqs: Vec<f64> =
        (0..spec.n_freqs).map(|j| lo + spec.span_ghz * j as f64 / (spec.n_freqs - 1) as f64).collect();
    let times: Vec<f64> = (0..spec.n_times)
        .map(|k| if spec.n_times > 1 { spec.duration_h * k as f64 / (spec.n_times - 1) as f64 } else { 0.0 })
        .collect();
    let states = telegraph_states(&defects, &times, &mut rng);
    let noise = rand_distr::Normal::new(0.0, spec.readout_noise).map_err(|e| Error::Invalid(e.to_string()))?;
    let mut pop = Vec::with_capacity(freqs.len() * times.len());
    for (k, &t) in times.iter().enumerate() {
        for &f in &freqs {
            let offset = (f - spec.center_ghz) * 1e3;
            let loss: f64 = defects
                .iter()
                .zip(&states)
                .filter(|(d, _)| !d.removed(t))
                .map(|(d, s)| d.loss_at(offset, s[k]))
                .sum();
            let gamma = 2.0 * PI * f * 1e9 * (cfg.delta_0 + loss);
            let p = (-spec.hold_us * 1e-6 * gamma).exp();
            let p = if spec.readout_noise > 0.0 { p + rng.sample(noise) } else { p };
            pop.push(p.clamp(0.0, 1.0));
        }
    }
    SwapMap::new(freqs, times, pop)
}
