// SPDX-License-Identifier: Apache-2.0

//! Thin-layer electric-field participation ratios of a coplanar capacitor.
//!
//! The capacitor is treated as a CPW section: a centre strip of `width`
//! separated by `gap` from semi-infinite ground planes, zero metal thickness,
//! on a substrate half-space. The conformal-map field on the surface plane is
//! `|E(x)| = V·b / (K(k')·√|(x²−a²)(x²−b²)|)` with `a = width/2`,
//! `b = a + gap`, `k = a/b`. Each interface layer of thickness `t` stores
//!
//! * metal-air: `½ε₀·t/ε_MA·|E_air|²` on the conductor tops,
//! * substrate-metal: `½ε₀·t·ε_sub²/ε_SM·|E_sub|²` under the conductors,
//! * substrate-air: `½ε₀·t·ε_SA·|E_t|²` across the gaps,
//!
//! normalised by the line energy `ε₀(ε_sub+1)·K(k)/K(k')·V²`. The `|E|²`
//! integrals diverge logarithmically at conductor edges and are cut off at
//! `edge_cutoff_ratio·min(width, gap)` from each edge, which keeps every
//! ratio proportional to `t/scale`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::dataset::QubitDesign;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceStack {
    /// nm
    pub t_ma: f64,
    pub t_sm: f64,
    pub t_sa: f64,
    pub eps_sub: f64,
    pub eps_ma: f64,
    pub eps_sm: f64,
    pub eps_sa: f64,
    #[serde(default = "default_cutoff")]
    pub edge_cutoff_ratio: f64,
}

fn default_cutoff() -> f64 {
    0.005
}

impl Default for InterfaceStack {
    fn default() -> Self {
        Self {
            t_ma: 5.0,
            t_sm: 5.0,
            t_sa: 3.0,
            eps_sub: 11.9,
            eps_ma: 10.0,
            eps_sm: 11.9,
            eps_sa: 3.9,
            edge_cutoff_ratio: default_cutoff(),
        }
    }
}

impl InterfaceStack {
    fn check(&self) -> Result<()> {
        let thick = [self.t_ma, self.t_sm, self.t_sa];
        let eps = [self.eps_sub, self.eps_ma, self.eps_sm, self.eps_sa];
        if thick.iter().any(|t| !(*t > 0.0)) || eps.iter().any(|e| !(*e >= 1.0)) {
            return Err(Error::domain(
                "interface thicknesses must be positive and permittivities >= 1",
            ));
        }
        if !(self.edge_cutoff_ratio > 0.0 && self.edge_cutoff_ratio < 0.25) {
            return Err(Error::domain("edge_cutoff_ratio must lie in (0, 0.25)"));
        }
        Ok(())
    }

    fn max_thickness_nm(&self) -> f64 {
        self.t_ma.max(self.t_sm).max(self.t_sa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticipationSet {
    pub p_sa: f64,
    pub p_sm: f64,
    pub p_ma: f64,
    pub p_total: f64,
}

impl ParticipationSet {
    fn new(p_sa: f64, p_sm: f64, p_ma: f64) -> Self {
        Self {
            p_sa,
            p_sm,
            p_ma,
            p_total: p_sa + p_sm + p_ma,
        }
    }
}

/// Complete elliptic integral of the first kind K(k) via the AGM.
pub fn elliptic_k(k: f64) -> f64 {
    let mut a = 1.0;
    let mut g = (1.0 - k * k).sqrt();
    for _ in 0..64 {
        if (a - g).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next;
    }
    PI / (2.0 * a)
}

/// Antiderivative of `1/((x²−a²)(x²−b²))`; zero at x = 0 and x → ∞.
fn field_antiderivative(x: f64, a: f64, b: f64) -> f64 {
    let g = |c: f64| ((x - c) / (x + c)).abs().ln() / (2.0 * c);
    (g(a) - g(b)) / (a * a - b * b)
}

/// Surface integrals of `√|(x²−a²)(x²−b²)|⁻²` over both conductors and both
/// gaps (whole line), edges excluded within `delta`.
fn surface_integrals(a: f64, b: f64, delta: f64) -> (f64, f64) {
    let f = |x: f64| field_antiderivative(x, a, b);
    let strip = f(a - delta) - f(0.0);
    let ground = -f(b + delta);
    let gap = f(a + delta) - f(b - delta);
    (2.0 * (strip + ground), 2.0 * gap)
}

/// Participation ratios for a capacitor of `width` and `gap` (μm).
pub fn participation(width: f64, gap: f64, stack: &InterfaceStack) -> Result<ParticipationSet> {
    if !(width > 0.0 && gap > 0.0) {
        return Err(Error::domain("width and gap must be positive"));
    }
    stack.check()?;
    let feature = width.min(gap);
    let t_max_um = stack.max_thickness_nm() * 1e-3;
    if t_max_um >= feature / 10.0 {
        return Err(Error::ThinFilm {
            thickness_nm: stack.max_thickness_nm(),
            feature_um: feature,
        });
    }

    let a = 0.5 * width;
    let b = a + gap;
    let k = a / b;
    let kp = (1.0 - k * k).sqrt();
    let delta = stack.edge_cutoff_ratio * feature;
    let (metal, gaps) = surface_integrals(a, b, delta);

    // |E|² prefactor (per V²) and line energy (per ε₀V²)
    let field_sq = (b / elliptic_k(kp)).powi(2);
    let energy = (stack.eps_sub + 1.0) * elliptic_k(k) / elliptic_k(kp);
    let scale = 0.5 * field_sq / energy;

    let p_ma = scale * stack.t_ma * 1e-3 / stack.eps_ma * metal;
    let p_sm = scale * stack.t_sm * 1e-3 * stack.eps_sub.powi(2) / stack.eps_sm * metal;
    let p_sa = scale * stack.t_sa * 1e-3 * stack.eps_sa * gaps;
    Ok(ParticipationSet::new(p_sa, p_sm, p_ma))
}

/// Participation ratios keyed by design name.
pub fn design_participations(
    designs: &[QubitDesign],
    stack: &InterfaceStack,
) -> Result<BTreeMap<String, ParticipationSet>> {
    designs
        .iter()
        .map(|d| Ok((d.name.clone(), participation(d.cap_width, d.cap_gap, stack)?)))
        .collect()
}
