// SPDX-License-Identifier: Apache-2.0

//! Closed-form links between junction resistance, Josephson energy, charging
//! energy and qubit frequency.
//!
//! All energies are expressed as frequencies (E/h). The Josephson energy uses
//! the zero-temperature Ambegaokar-Baratoff limit.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::units::{Ghz, Mhz};

/// One square micrometre in m².
const UM2: f64 = 1e-12;
/// Unit resistance-area product, 1 Ω·μm², in Ω·m².
const OHM_UM2: f64 = UM2;

/// Junction resistance `r_n` (Ω), area (μm²) and RA product (Ω·μm²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionParams {
    pub r_n: f64,
    pub area: f64,
    pub ra_product: f64,
}

impl JunctionParams {
    pub fn from_ra(ra_product: f64, area: f64) -> Result<Self> {
        positive("ra_product", ra_product)?;
        positive("area", area)?;
        Ok(Self {
            r_n: ra_product / area,
            area,
            ra_product,
        })
    }

    pub fn from_resistance(r_n: f64, area: f64) -> Result<Self> {
        positive("r_n", r_n)?;
        positive("area", area)?;
        Ok(Self {
            r_n,
            area,
            ra_product: r_n * area,
        })
    }

    pub fn is_consistent(&self) -> bool {
        self.r_n > 0.0
            && self.area > 0.0
            && self.ra_product > 0.0
            && ((self.r_n * self.area - self.ra_product) / self.ra_product).abs() <= 1e-9
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

/// Transmon transition frequency `√(8·E_J·E_C) − E_C`.
pub fn fqb_from_energies(e_j: Ghz, e_c: Mhz) -> Result<Ghz> {
    positive("e_j", e_j.0)?;
    positive("e_c", e_c.0)?;
    let e_c = Ghz::from(e_c).0;
    Ok(Ghz((8.0 * e_j.0 * e_c).sqrt() - e_c))
}

/// Josephson energy E_J/h from the normal-state resistance:
/// `(Δ/h)·(h/e²)/(8·R_n)`.
pub fn ej_from_rn(r_n: f64, constants: &PhysicalConstants) -> Result<Ghz> {
    positive("r_n", r_n)?;
    let gap_hz = constants.gap_joules() / constants.h;
    Ok(Ghz::from_hz(gap_hz * constants.resistance_quantum() / (8.0 * r_n)))
}

/// Inverse of [`ej_from_rn`].
pub fn rn_from_ej(e_j: Ghz, constants: &PhysicalConstants) -> Result<f64> {
    positive("e_j", e_j.0)?;
    let gap_hz = constants.gap_joules() / constants.h;
    Ok(gap_hz * constants.resistance_quantum() / (8.0 * e_j.hz()))
}

/// Full chain R_n → E_J → f_qb.
pub fn fqb_from_rn(r_n: f64, e_c: Mhz, constants: &PhysicalConstants) -> Result<Ghz> {
    fqb_from_energies(ej_from_rn(r_n, constants)?, e_c)
}

/// Quality factor `Q = 2π·T1·f_qb`, with T1 in μs.
pub fn quality_factor(t1_us: f64, f_qb: Ghz) -> Result<f64> {
    positive("t1", t1_us)?;
    positive("f_qb", f_qb.0)?;
    Ok(2.0 * PI * t1_us * 1e-6 * f_qb.hz())
}

/// Inverse of [`quality_factor`]: T1 (μs) for a given Q.
pub fn t1_from_quality_factor(q: f64, f_qb: Ghz) -> Result<f64> {
    positive("q", q)?;
    positive("f_qb", f_qb.0)?;
    Ok(q / (2.0 * PI * f_qb.hz()) * 1e6)
}

/// Area-normalised frequency `f_qb/√A` in GHz/μm.
pub fn scaled_frequency(f_qb: Ghz, area_um2: f64) -> Result<f64> {
    positive("area", area_um2)?;
    Ok(f_qb.0 / area_um2.sqrt())
}

/// Proportionality factor X with `f_qb/√A ≈ X/√RA` (RA in Ω·μm², result in
/// GHz/μm). `X = √(Δ·E_C/(h·e²·1Ω·1μm²))`; the −E_C offset of the full chain
/// is not included.
pub fn ra_proportionality_factor(e_c: Mhz, constants: &PhysicalConstants) -> Result<f64> {
    positive("e_c", e_c.0)?;
    let e_c_joules = constants.h * e_c.hz();
    let hz_per_m = (constants.gap_joules() * e_c_joules
        / (constants.h * constants.e * constants.e * OHM_UM2))
        .sqrt();
    // Hz/m -> GHz/um
    Ok(hz_per_m * 1e-6 * 1e-9)
}

/// Flux-dependent Josephson energy of a symmetric SQUID,
/// `E_J,max·|cos(π·Φ/Φ₀)|`.
pub fn squid_ej(e_j_max: Ghz, flux_quanta: f64) -> Result<Ghz> {
    positive("e_j_max", e_j_max.0)?;
    Ok(Ghz(e_j_max.0 * (PI * flux_quanta).cos().abs()))
}

/// Relative standard deviation (std/mean) with the population normalisation.
pub fn rsd(samples: &[f64]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean != 0.0).then(|| var.sqrt() / mean.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::table_i;

    fn c() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn table_rows_i1_and_x1() {
        let f = fqb_from_energies(Ghz(10.56), Mhz(203.0)).unwrap();
        assert!((f.0 - 3.94).abs() < 0.01, "{f}");
        let f = fqb_from_energies(Ghz(5.94), Mhz(231.0)).unwrap();
        assert!((f.0 - 3.08).abs() < 0.01, "{f}");
    }

    #[test]
    fn zero_frequency_when_ej_is_ec_over_eight() {
        let e_c = Mhz(200.0);
        let f = fqb_from_energies(Ghz(0.2 / 8.0), e_c).unwrap();
        assert!(f.0.abs() < 1e-15);
    }

    #[test]
    fn every_table_row_within_10_mhz() {
        for d in table_i() {
            let f = fqb_from_energies(Ghz(d.e_j_target), Mhz(d.e_c)).unwrap();
            assert!((f.0 - d.f_qb_target).abs() <= 0.010, "{} {}", d.name, f.0);
        }
    }

    #[test]
    fn nonpositive_inputs_are_domain_errors() {
        assert!(fqb_from_energies(Ghz(0.0), Mhz(200.0)).is_err());
        assert!(fqb_from_energies(Ghz(1.0), Mhz(-1.0)).is_err());
        assert!(ej_from_rn(0.0, &c()).is_err());
        assert!(quality_factor(-1.0, Ghz(3.0)).is_err());
        assert!(scaled_frequency(Ghz(4.0), 0.0).is_err());
        assert!(ra_proportionality_factor(Mhz(0.0), &c()).is_err());
        assert!(squid_ej(Ghz(0.0), 0.0).is_err());
    }

    #[test]
    fn ambegaokar_baratoff_reference_value() {
        // independent evaluation with the published constants
        let delta = 180e-6 * 1.602_176_634e-19;
        let h = 6.626_070_15e-34;
        let rk = h / 1.602_176_634e-19_f64.powi(2);
        let expect = delta / h * rk / (8.0 * 13_300.0) * 1e-9;
        let got = ej_from_rn(13_300.0, &c()).unwrap().0;
        assert!((got - expect).abs() / expect < 1e-12);
        assert!((got - 10.56).abs() < 0.01);
    }

    #[test]
    fn ej_halves_when_rn_doubles() {
        let a = ej_from_rn(8000.0, &c()).unwrap().0;
        let b = ej_from_rn(16000.0, &c()).unwrap().0;
        assert!((a / b - 2.0).abs() < 1e-12);
        let back = rn_from_ej(Ghz(a), &c()).unwrap();
        assert!((back - 8000.0).abs() < 1e-8);
    }

    #[test]
    fn quadrupled_resistance_halves_plasma_frequency() {
        let e_c = Mhz(231.0);
        let r = 12_000.0;
        let lhs = fqb_from_rn(4.0 * r, e_c, &c()).unwrap().0 + 0.231;
        let rhs = 0.5 * (fqb_from_rn(r, e_c, &c()).unwrap().0 + 0.231);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn quality_factor_values() {
        let q = quality_factor(75.0, Ghz(3.0)).unwrap();
        assert!((q - 2.0 * PI * 3e9 * 75e-6).abs() < 1e-6);
        assert!((q - 1.4137e6).abs() / 1.4137e6 < 1e-4);
        let q2 = quality_factor(150.0, Ghz(1.5)).unwrap();
        assert!((q - q2).abs() < 1e-6);
        let t1 = t1_from_quality_factor(q, Ghz(3.0)).unwrap();
        assert!((t1 - 75.0).abs() < 1e-12);
        // inverse of the loss 1/Q
        let loss = 1.0 / (2.0 * PI * 75e-6 * 3e9);
        assert!((1.0 / q - loss).abs() < 1e-20);
    }

    #[test]
    fn scaled_frequency_values() {
        assert!((scaled_frequency(Ghz(4.0), 0.04).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(scaled_frequency(Ghz(4.2), 1.0).unwrap(), 4.2);
    }

    #[test]
    fn scaled_frequency_nearly_area_independent_at_fixed_ra() {
        let ra = 300.0;
        let e_c = Mhz(231.0);
        let s = |area: f64| {
            let f = fqb_from_rn(ra / area, e_c, &c()).unwrap();
            scaled_frequency(f, area).unwrap()
        };
        let (a, b) = (s(0.02), s(0.08));
        assert!((a - b).abs() / b < 0.03, "{a} {b}");
    }

    #[test]
    fn x_factor_matches_full_chain() {
        let e_c = Mhz(231.0);
        let x = ra_proportionality_factor(e_c, &c()).unwrap();
        // Table I x6..x9 frequency range; the gap to the full chain is E_C/f_qb.
        for area in [0.03, 0.045, 0.06] {
            for ra in [150.0, 200.0, 250.0] {
                let f = fqb_from_rn(ra / area, e_c, &c()).unwrap();
                if !(4.7..=6.1).contains(&f.0) {
                    continue;
                }
                let s = scaled_frequency(f, area).unwrap();
                let approx = x / (ra as f64).sqrt();
                assert!((approx - s).abs() / s < 0.05, "area {area} ra {ra}: {approx} vs {s}");
            }
        }
        let x4 = ra_proportionality_factor(Mhz(4.0 * 231.0), &c()).unwrap();
        assert!((x4 / x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn squid_symmetry() {
        let e = Ghz(17.75);
        assert_eq!(squid_ej(e, 0.0).unwrap().0, 17.75);
        assert!(squid_ej(e, 0.5).unwrap().0.abs() < 1e-12);
        for phi in [0.1, 0.23, 0.4, 0.77] {
            let a = squid_ej(e, phi).unwrap().0;
            assert!((a - squid_ej(e, -phi).unwrap().0).abs() < 1e-12);
            assert!((a - squid_ej(e, phi + 1.0).unwrap().0).abs() < 1e-12);
        }
    }

    #[test]
    fn junction_params_consistency() {
        let j = JunctionParams::from_ra(300.0, 0.05).unwrap();
        assert!(j.is_consistent());
        assert!((j.r_n - 6000.0).abs() < 1e-9);
        assert!(JunctionParams::from_resistance(-1.0, 0.05).is_err());
    }
}
