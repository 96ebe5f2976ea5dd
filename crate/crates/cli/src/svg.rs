// SPDX-License-Identifier: Apache-2.0

//! Wafer-map SVG. Coordinates are printed with two decimals and labels with
//! three significant digits, so output is stable across platforms.

use std::fmt::Write as _;

use waferqc_core::stats::RadialProfile;
use waferqc_core::{GridPosition, DIE_PITCH_X_MM, DIE_PITCH_Y_MM, WAFER_RADIUS_MM};

use crate::CliError;

const PX_PER_MM: f64 = 2.0;
const MARGIN: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DieValue {
    pub position: GridPosition,
    pub mean: f64,
    pub std: f64,
}

/// Three significant digits, no exponent for ordinary magnitudes.
pub fn sig3(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-3..6).contains(&mag) {
        return format!("{x:.2e}");
    }
    let decimals = (2 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Blue → red ramp, `t ∈ [0, 1]`.
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(49.0, 215.0), lerp(104.0, 48.0), lerp(189.0, 39.0))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One `<g class="die">` per value: a cell filled from the radial profile at
/// the die centre (or from the die mean without a profile), annotated with
/// `mean ± std`.
pub fn emit_wafer_map(values: &[DieValue], profile: Option<&RadialProfile>, title: &str) -> Result<String, CliError> {
    if values.is_empty() {
        return Err(CliError::Validation("wafer map needs at least one die".into()));
    }
    let shade: Vec<f64> = values
        .iter()
        .map(|v| profile.map_or(v.mean, |p| p.eval(v.position.center_radius())))
        .collect();
    let lo = shade.iter().copied().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
    let hi = shade.iter().copied().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let size = 2.0 * (WAFER_RADIUS_MM * PX_PER_MM + MARGIN);
    let c = size / 2.0;
    let (w, h) = (DIE_PITCH_X_MM * PX_PER_MM, DIE_PITCH_Y_MM * PX_PER_MM);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.2}" height="{:.2}" viewBox="0 0 {size:.2} {:.2}">"#,
        size + 40.0,
        size + 40.0
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(
        s,
        r##"<circle cx="{c:.2}" cy="{c:.2}" r="{:.2}" fill="none" stroke="#444" stroke-width="1"/>"##,
        WAFER_RADIUS_MM * PX_PER_MM
    );
    for (v, z) in values.iter().zip(&shade) {
        let t = if hi > lo && z.is_finite() { (z - lo) / (hi - lo) } else { 0.5 };
        let (x, y) = v.position.center_mm();
        let (px, py) = (c + x * PX_PER_MM, c - y * PX_PER_MM);
        let _ = writeln!(s, r#"<g class="die" data-col="{}" data-row="{}">"#, v.position.0, v.position.1);
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{w:.2}" height="{h:.2}" fill="{}" stroke="#fff" stroke-width="0.5"/>"##,
            px - w / 2.0,
            py - h / 2.0,
            ramp(t)
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" font-size="8" text-anchor="middle">{} ± {}</text>"#,
            py + 3.0,
            sig3(v.mean),
            sig3(v.std)
        );
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN:.2}" y="{:.2}" font-size="12">colour scale {} (blue) to {} (red)</text>"#,
        size + 25.0,
        sig3(if lo.is_finite() { lo } else { f64::NAN }),
        sig3(if hi.is_finite() { hi } else { f64::NAN })
    );
    s.push_str("</svg>\n");
    Ok(s)
}
