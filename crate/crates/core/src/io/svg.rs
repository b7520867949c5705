//! Self-contained SVG figures: occupation heatmaps and line plots.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::{OccupationMap, SweepAxis};

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 20.0;
const PLOT_W: f64 = 360.0;
const PLOT_H: f64 = 260.0;
const MARGIN_BOTTOM: f64 = 50.0;
const BAR_GAP: f64 = 20.0;
const BAR_W: f64 = 14.0;
const MARGIN_RIGHT: f64 = 70.0;

/// Anchor colors (viridis) at occupation 0, 0.25, 0.5, 0.75, 1.
const VIRIDIS: [(u8, u8, u8); 5] = [
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
];

/// Hex color for an occupation in [0, 1] (clamped).
pub fn colormap(x: f64) -> String {
    let x = if x.is_nan() { 0.0 } else { x.clamp(0.0, 1.0) };
    let pos = x * (VIRIDIS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(VIRIDIS.len() - 2);
    let f = pos - i as f64;
    let lerp = |a: u8, b: u8| (a as f64 + f * (b as f64 - a as f64)).round() as u8;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    format!("#{:02x}{:02x}{:02x}", lerp(a.0, b.0), lerp(a.1, b.1), lerp(a.2, b.2))
}

fn axis_title(axis: &SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Spacing { .. } => "Notch spacing (meV)",
        SweepAxis::Width { .. } => "Notch width (meV)",
    }
}

/// Cell edges halfway between grid points, extended by half a step at the
/// ends.
fn edges(v: &[f64]) -> Vec<f64> {
    if v.len() == 1 {
        return vec![v[0] - 0.5, v[0] + 0.5];
    }
    let mut e = Vec::with_capacity(v.len() + 1);
    e.push(v[0] - 0.5 * (v[1] - v[0]));
    for w in v.windows(2) {
        e.push(0.5 * (w[0] + w[1]));
    }
    let n = v.len();
    e.push(v[n - 1] + 0.5 * (v[n - 1] - v[n - 2]));
    e
}

/// Up to about six round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(x: f64) -> String {
    let s = format!("{:.3}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Tick label for an area given in units of π.
fn pi_label(k: f64) -> String {
    match fmt_tick(k).as_str() {
        "0" => "0".into(),
        "1" => "π".into(),
        s => format!("{s}π"),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
}

/// Axis lines, ticks and titles for a plot box at `(x0, y0)`; x values are
/// areas in units of π.
#[allow(clippy::too_many_arguments)]
fn axes(
    out: &mut String,
    x0: f64,
    y0: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    x_title: &str,
    y_title: &str,
    y_ticks_fmt: fn(f64) -> String,
) {
    let sx = |x: f64| x0 + (x - x_range.0) / (x_range.1 - x_range.0) * PLOT_W;
    let sy = |y: f64| y0 + PLOT_H - (y - y_range.0) / (y_range.1 - y_range.0) * PLOT_H;
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y0}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x_range.0, x_range.1) {
        let x = sx(t);
        let yb = y0 + PLOT_H;
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{yb}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, yb + 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            yb + 18.0,
            pi_label(t)
        );
    }
    for t in ticks(y_range.0, y_range.1) {
        let y = sy(t);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            y + 4.0,
            y_ticks_fmt(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        x0 + PLOT_W / 2.0,
        y0 + PLOT_H + 40.0,
        escape(x_title)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate({:.2},{:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        x0 - 48.0,
        y0 + PLOT_H / 2.0,
        escape(y_title)
    );
}

fn heatmap_body(out: &mut String, map: &OccupationMap, emitter: usize, x0: f64, y0: f64) {
    let xe: Vec<f64> = edges(map.areas()).into_iter().map(|a| a / PI).collect();
    let ye = edges(map.axis_values());
    let (xl, xh) = (xe[0], xe[xe.len() - 1]);
    let (yl, yh) = (ye[0], ye[ye.len() - 1]);
    let sx = |x: f64| x0 + (x - xl) / (xh - xl) * PLOT_W;
    let sy = |y: f64| y0 + PLOT_H - (y - yl) / (yh - yl) * PLOT_H;
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for a in 0..map.areas().len() {
        for v in 0..map.axis_values().len() {
            let (x1, x2) = (sx(xe[a]), sx(xe[a + 1]));
            let (y1, y2) = (sy(ye[v + 1]), sy(ye[v]));
            let _ = writeln!(
                out,
                r#"<rect x="{x1:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x2 - x1,
                y2 - y1,
                colormap(map.get(a, v, emitter))
            );
        }
    }
    let _ = writeln!(out, "</g>");
    axes(
        out,
        x0,
        y0,
        (xl, xh),
        (yl, yh),
        "Pulse area (rad)",
        axis_title(&map.spec.axis),
        fmt_tick,
    );
}

fn colorbar(out: &mut String, x: f64, y0: f64) {
    let steps = 50;
    let h = PLOT_H / steps as f64;
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for i in 0..steps {
        let v = (i as f64 + 0.5) / steps as f64;
        let y = y0 + PLOT_H - (i + 1) as f64 * h;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{BAR_W}" height="{:.2}" fill="{}"/>"#,
            h + 0.01,
            colormap(v)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<rect x="{x:.2}" y="{y0}" width="{BAR_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
    );
    for t in [0.0, 0.5, 1.0] {
        let y = y0 + PLOT_H - t * PLOT_H;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + BAR_W + 4.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text transform="translate({:.2},{:.2}) rotate(90)" text-anchor="middle">Exciton occupation</text>"#,
        x + BAR_W + 32.0,
        y0 + PLOT_H / 2.0
    );
}

fn panel_size() -> (f64, f64) {
    (
        MARGIN_LEFT + PLOT_W + BAR_GAP + BAR_W + MARGIN_RIGHT,
        MARGIN_TOP + PLOT_H + MARGIN_BOTTOM,
    )
}

/// Heatmap of one emitter's (0-based) occupation over area × axis value.
pub fn heatmap_svg(map: &OccupationMap, emitter: usize) -> Result<String> {
    if emitter >= map.n_emitters() {
        return Err(Error::param("emitter", "index out of range"));
    }
    let (w, h) = panel_size();
    let mut out = String::new();
    header(&mut out, w, h);
    heatmap_body(&mut out, map, emitter, MARGIN_LEFT, MARGIN_TOP);
    colorbar(&mut out, MARGIN_LEFT + PLOT_W + BAR_GAP, MARGIN_TOP);
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn render_heatmap(map: &OccupationMap, emitter: usize, path: &Path) -> Result<()> {
    std::fs::write(path, heatmap_svg(map, emitter)?)?;
    Ok(())
}

/// All emitters side by side, each panel titled `QD i`.
pub fn panels_svg(map: &OccupationMap) -> String {
    let (pw, ph) = panel_size();
    let n = map.n_emitters();
    let cols = n.min(5);
    let rows = n.div_ceil(cols);
    let title_h = 20.0;
    let (w, h) = (pw * cols as f64, (ph + title_h) * rows as f64);
    let mut out = String::new();
    header(&mut out, w, h);
    for e in 0..n {
        let ox = pw * (e % cols) as f64;
        let oy = (ph + title_h) * (e / cols) as f64;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-weight="bold">QD {}</text>"#,
            ox + MARGIN_LEFT + PLOT_W / 2.0,
            oy + 16.0,
            e + 1
        );
        heatmap_body(&mut out, map, e, ox + MARGIN_LEFT, oy + title_h + MARGIN_TOP);
        colorbar(&mut out, ox + MARGIN_LEFT + PLOT_W + BAR_GAP, oy + title_h + MARGIN_TOP);
    }
    out.push_str("</svg>\n");
    out
}

/// One curve of a line plot.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    /// Areas (rad).
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub color: String,
    pub dashed: bool,
}

/// Distinct colors for emitters, symmetric partners sharing one.
pub fn emitter_color(emitter: usize, n: usize) -> String {
    const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let k = emitter.min(n - 1 - emitter);
    PALETTE[k % PALETTE.len()].to_string()
}

/// Occupation versus pulse area.
pub fn line_plot_svg(series: &[Series]) -> String {
    let legend_w = 170.0;
    let w = MARGIN_LEFT + PLOT_W + 20.0 + legend_w;
    let h = MARGIN_TOP + PLOT_H + MARGIN_BOTTOM;
    let mut out = String::new();
    header(&mut out, w, h);
    let x_max = series
        .iter()
        .flat_map(|s| s.x.iter().copied())
        .fold(0.0f64, f64::max)
        / PI;
    let x_min = series
        .iter()
        .flat_map(|s| s.x.iter().copied())
        .fold(f64::INFINITY, f64::min)
        / PI;
    let (xl, xh) = if x_max > x_min { (x_min, x_max) } else { (x_min - 1.0, x_min + 1.0) };
    let (x0, y0) = (MARGIN_LEFT, MARGIN_TOP);
    let sx = |x: f64| x0 + (x / PI - xl) / (xh - xl) * PLOT_W;
    let sy = |y: f64| y0 + PLOT_H - y.clamp(-0.05, 1.05) * PLOT_H;
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .x
            .iter()
            .zip(&s.y)
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            pts.join(" "),
            s.color
        );
        let ly = y0 + 12.0 + 18.0 * i as f64;
        let lx = x0 + PLOT_W + 20.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            lx + 24.0,
            s.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    axes(
        &mut out,
        x0,
        y0,
        (xl, xh),
        (0.0, 1.0),
        "Pulse area (rad)",
        "Exciton occupation",
        fmt_tick,
    );
    out.push_str("</svg>\n");
    out
}

/// Line cuts of every emitter at one axis value.
pub fn line_cut_series(map: &OccupationMap, value: usize, label_suffix: &str, dashed: bool) -> Vec<Series> {
    (0..map.n_emitters())
        .map(|e| Series {
            label: format!("QD {}{label_suffix}", e + 1),
            x: map.areas().to_vec(),
            y: map.line_cut(value, e),
            color: emitter_color(e, map.n_emitters()),
            dashed,
        })
        .collect()
}
