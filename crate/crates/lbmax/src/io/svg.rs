//! Deterministic SVG heatmaps with a linear colour map and a min/max
//! legend, plus the Hammer equal-area projection for sphere fields.

use std::f64::consts::SQRT_2;
use std::fmt::Write;

use crate::error::{invalid, Result};
use crate::io::table::format_sig;

/// Colour stops from low to high (a blue to yellow ramp).
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];
const MASK_COLOR: &str = "#d9d9d9";
const MARGIN: f64 = 10.0;
const TITLE_H: f64 = 20.0;
const LEGEND_W: f64 = 70.0;

/// Drawing options shared by all plots.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// side of one heatmap cell, or plot width for scatter plots
    pub cell: f64,
    pub title: String,
}

impl Default for Layout {
    fn default() -> Self {
        Layout { cell: 12.0, title: String::new() }
    }
}

/// Hex colour for t in [0, 1].
pub fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let c: Vec<u8> = (0..3).map(|j| (STOPS[i][j] + f * (STOPS[i + 1][j] - STOPS[i][j])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn range(values: impl Iterator<Item = f64>) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut any = false;
    for v in values {
        if !v.is_finite() {
            return invalid(format!("non-finite value {v} in field"));
        }
        lo = lo.min(v);
        hi = hi.max(v);
        any = true;
    }
    if !any {
        return invalid("field has no values");
    }
    Ok((lo, hi))
}

fn unit(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{width:.1}" height="{height:.1}" fill="white"/>"#);
    if !title.is_empty() {
        let _ = writeln!(out, r#"<text x="{MARGIN:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#, TITLE_H - 6.0, escape(title));
    }
}

/// Vertical colour bar at (x, y) with the maximum on top.
fn legend(out: &mut String, x: f64, y: f64, h: f64, lo: f64, hi: f64) {
    let steps = 16;
    let sh = h / steps as f64;
    for i in 0..steps {
        let t = 1.0 - (i as f64 + 0.5) / steps as f64;
        let _ = writeln!(out, r#"<rect x="{x:.1}" y="{:.2}" width="12.0" height="{:.2}" fill="{}"/>"#, y + i as f64 * sh, sh, color(t));
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10">max {}</text>"#, x + 16.0, y + 8.0, format_sig(hi, 4));
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10">min {}</text>"#, x + 16.0, y + h, format_sig(lo, 4));
}

/// Heatmap of a rows x cols field stored row-major, row 0 drawn at the
/// bottom. Cells with `mask[i] == false` are drawn grey and excluded from
/// the colour range.
pub fn emit_svg_heatmap(values: &[f64], rows: usize, cols: usize, mask: Option<&[bool]>, layout: &Layout) -> Result<String> {
    if rows == 0 || cols == 0 || values.len() != rows * cols {
        return invalid(format!("field of length {} does not match {rows} x {cols}", values.len()));
    }
    if let Some(m) = mask {
        if m.len() != values.len() {
            return invalid("mask length differs from the field");
        }
    }
    let shown = |i: usize| mask.is_none_or(|m| m[i]);
    let (lo, hi) = range((0..values.len()).filter(|&i| shown(i)).map(|i| values[i]))?;
    let c = layout.cell;
    let (pw, ph) = (cols as f64 * c, rows as f64 * c);
    let top = MARGIN + TITLE_H;
    let mut out = String::new();
    header(&mut out, pw + 2.0 * MARGIN + LEGEND_W, ph + top + MARGIN, &layout.title);
    for r in 0..rows {
        for q in 0..cols {
            let i = r * cols + q;
            let fill = if shown(i) { color(unit(values[i], lo, hi)) } else { MASK_COLOR.to_string() };
            let y = top + (rows - 1 - r) as f64 * c;
            let _ = writeln!(out, r#"<rect x="{:.2}" y="{y:.2}" width="{c:.2}" height="{c:.2}" fill="{fill}"/>"#, MARGIN + q as f64 * c);
        }
    }
    legend(&mut out, pw + 2.0 * MARGIN, top, ph.max(40.0), lo, hi);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Hammer projection of longitude `theta` and latitude `phi`:
/// x = 2 sqrt2 cos(phi) sin(theta/2) / s, y = sqrt2 sin(phi) / s with
/// s = sqrt(1 + cos(phi) cos(theta/2)).
pub fn hammer_project(theta: f64, phi: f64) -> (f64, f64) {
    let s = (1.0 + phi.cos() * (theta / 2.0).cos()).sqrt();
    (2.0 * SQRT_2 * phi.cos() * (theta / 2.0).sin() / s, SQRT_2 * phi.sin() / s)
}

/// Longitude in (-pi, pi] and latitude of a point on a sphere about the
/// origin.
pub fn longitude_latitude(p: [f64; 3]) -> (f64, f64) {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    (p[1].atan2(p[0]), (p[2] / r).clamp(-1.0, 1.0).asin())
}

/// Values at sphere points drawn as dots on the Hammer ellipse.
/// `layout.cell` is the plot width.
pub fn emit_svg_hammer(points: &[[f64; 3]], values: &[f64], layout: &Layout) -> Result<String> {
    if points.len() != values.len() {
        return invalid("points and values differ in length");
    }
    let (lo, hi) = range(values.iter().copied())?;
    let w = layout.cell;
    let h = w / 2.0;
    let scale = w / (4.0 * SQRT_2);
    let top = MARGIN + TITLE_H;
    let (cx, cy) = (MARGIN + w / 2.0, top + h / 2.0);
    let dot = (w / (points.len() as f64).sqrt() * 0.9).max(1.0);
    let mut out = String::new();
    header(&mut out, w + 2.0 * MARGIN + LEGEND_W, h + top + MARGIN, &layout.title);
    let _ = writeln!(out, r#"<ellipse cx="{cx:.2}" cy="{cy:.2}" rx="{:.2}" ry="{:.2}" fill="none" stroke="black" stroke-width="0.5"/>"#, w / 2.0, h / 2.0);
    // low values first so peaks stay visible where dots overlap
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    for i in order {
        let (theta, phi) = longitude_latitude(points[i]);
        let (x, y) = hammer_project(theta, phi);
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}"/>"#, cx + scale * x, cy - scale * y, dot / 2.0, color(unit(values[i], lo, hi)));
    }
    legend(&mut out, w + 2.0 * MARGIN, top, h.max(40.0), lo, hi);
    out.push_str("</svg>\n");
    Ok(out)
}
