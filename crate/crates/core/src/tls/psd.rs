// SPDX-License-Identifier: Apache-2.0

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::TlsTrack;
use crate::error::{Error, Result};

/// Largest tolerated fraction of missing track samples.
pub const MAX_GAP_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    /// Hz
    pub freqs: Vec<f64>,
    /// One-sided density, units² per Hz.
    pub psd: Vec<f64>,
    /// Mean-removed (1/N) variance of the input series.
    pub variance: f64,
    pub df: f64,
}

impl Periodogram {
    /// `Σ psd·Δf`; equals `variance` for an unwindowed periodogram.
    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.df
    }
}

/// One-sided periodogram of the mean-removed series sampled every `dt`
/// seconds. DC and Nyquist bins are not doubled. With `hann`, the window is
/// power-normalised.
pub fn periodogram(series: &[f64], dt: f64, hann: bool) -> Periodogram {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let window: Vec<f64> = if hann {
        (0..n)
            .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
            .collect()
    } else {
        vec![1.0; n]
    };
    let norm: f64 = window.iter().map(|w| w * w).sum();
    let mut buf: Vec<Complex<f64>> =
        series.iter().zip(&window).map(|(x, w)| Complex::new((x - mean) * w, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let df = 1.0 / (n as f64 * dt);
    let mut freqs = Vec::with_capacity(half + 1);
    let mut psd = Vec::with_capacity(half + 1);
    for (k, x) in buf.iter().enumerate().take(half + 1) {
        let edge = k == 0 || (n % 2 == 0 && k == half);
        let scale = if edge { 1.0 } else { 2.0 };
        freqs.push(k as f64 * df);
        psd.push(scale * dt * x.norm_sqr() / norm);
    }
    let variance = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    Periodogram { freqs, psd, variance, df }
}

/// Frequency-noise spectrum of a track, in Hz²/Hz. Interior gaps are
/// linearly interpolated, leading/trailing ones held at the nearest sample.
pub fn track_psd(track: &TlsTrack) -> Result<Periodogram> {
    let n = track.frequencies.len();
    if n != track.timestamps.len() {
        return Err(Error::Invalid("track grids differ in length".into()));
    }
    if n < 101 {
        return Err(Error::insufficient(format!("{n} samples; need a record of 100 intervals")));
    }
    let dt_h = (track.timestamps[n - 1] - track.timestamps[0]) / (n - 1) as f64;
    let uniform = track
        .timestamps
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt_h).abs() <= 1e-6 * dt_h);
    if !(dt_h > 0.0) || !uniform {
        return Err(Error::Invalid("track timestamps are not uniformly spaced".into()));
    }
    let gaps = track.frequencies.iter().filter(|f| f.is_none()).count();
    if gaps as f64 > MAX_GAP_FRACTION * n as f64 {
        return Err(Error::TooManyGaps { gaps, total: n });
    }

    let known: Vec<(usize, f64)> = track
        .frequencies
        .iter()
        .enumerate()
        .filter_map(|(i, f)| f.map(|f| (i, f * 1e9)))
        .collect();
    let mut series = vec![0.0; n];
    let mut k = 0;
    for (i, s) in series.iter_mut().enumerate() {
        while k + 1 < known.len() && known[k + 1].0 <= i {
            k += 1;
        }
        let (i0, y0) = known[k];
        *s = if i <= i0 || k + 1 == known.len() {
            y0
        } else {
            let (i1, y1) = known[k + 1];
            y0 + (y1 - y0) * (i - i0) as f64 / (i1 - i0) as f64
        };
    }
    Ok(periodogram(&series, dt_h * 3600.0, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{fit_lorentzian_psd, LorentzianOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn track(freqs: Vec<Option<f64>>, dt_h: f64) -> TlsTrack {
        TlsTrack {
            defect_id: "t".into(),
            timestamps: (0..freqs.len()).map(|i| i as f64 * dt_h).collect(),
            prominences: freqs.iter().map(|f| f.map(|_| 0.3)).collect(),
            frequencies: freqs,
        }
    }

    /// Symmetric telegraph with switching rate `gamma` (Hz), sampled every
    /// `dt` seconds: exact two-state Markov transitions.
    fn telegraph(rng: &mut ChaCha8Rng, n: usize, dt: f64, gamma: f64, amp: f64) -> Vec<f64> {
        let p_flip = 0.5 * (1.0 - (-2.0 * gamma * dt).exp());
        let mut s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        (0..n)
            .map(|_| {
                let v = s * amp;
                if rng.random_bool(p_flip) {
                    s = -s;
                }
                v
            })
            .collect()
    }

    #[test]
    fn parseval_even_odd_and_hann() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [256, 257] {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = periodogram(&x, 0.3, false);
            assert!((p.total_power() / p.variance - 1.0).abs() < 1e-10);
            let h = periodogram(&x, 0.3, true);
            assert!((h.total_power() / h.variance - 1.0).abs() < 0.2);
        }
    }

    #[test]
    fn constant_track_is_silent() {
        let p = track_psd(&track(vec![Some(4.2); 200], 0.05)).unwrap();
        assert!(p.psd.iter().all(|v| *v < 1e-12));
    }

    #[test]
    fn sinusoid_peaks_at_its_frequency() {
        let (n, dt_h) = (400usize, 0.05);
        let f0 = 17.0 / (n as f64 * dt_h * 3600.0);
        let fr = (0..n)
            .map(|i| Some(4.2 + 1e-3 * (2.0 * std::f64::consts::PI * f0 * i as f64 * dt_h * 3600.0).sin()))
            .collect();
        let p = track_psd(&track(fr, dt_h)).unwrap();
        let k = (0..p.psd.len()).max_by(|&a, &b| p.psd[a].total_cmp(&p.psd[b])).unwrap();
        assert_eq!(k, 17);
        assert!((p.freqs[k] - f0).abs() < 1e-15);
        assert!((p.total_power() / p.variance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaps() {
        let mut fr: Vec<Option<f64>> = vec![Some(4.2); 200];
        for i in (0..200).step_by(5) {
            fr[i] = None;
        }
        assert!(track_psd(&track(fr.clone(), 0.05)).is_ok());
        for i in (1..200).step_by(8) {
            fr[i] = None;
        }
        assert!(matches!(track_psd(&track(fr, 0.05)), Err(Error::TooManyGaps { .. })));
        assert!(track_psd(&track(vec![Some(4.2); 60], 0.05)).is_err());
    }

    #[test]
    fn telegraph_rate_recovered_median_over_records() {
        // 13 h at 3 min steps: only ~11 switches per record, so single-record
        // scatter is ~30%; the estimator is judged on the median of 20.
        let gamma = 0.241e-3;
        let mut est: Vec<f64> = (0..20)
            .map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = telegraph(&mut rng, 261, 180.0, gamma, 2e-3);
                let fr = x.iter().map(|d| Some(4.2 + d)).collect();
                let p = track_psd(&track(fr, 0.05)).unwrap();
                assert!((p.total_power() / p.variance - 1.0).abs() < 0.01);
                fit_lorentzian_psd(&p.freqs, &p.psd, LorentzianOptions::periodogram()).unwrap().gamma
            })
            .collect();
        est.sort_by(f64::total_cmp);
        let median = 0.5 * (est[9] + est[10]);
        assert!((median / gamma - 1.0).abs() < 0.25, "{median} {est:?}");
    }
}
