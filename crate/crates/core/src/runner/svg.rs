use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::{ScanResult, SuperpositionScan};
use crate::entangle::NegativityReport;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvgKind {
    Lines,
    Heatmap,
}

impl FromStr for SvgKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lines" => Ok(SvgKind::Lines),
            "heatmap" => Ok(SvgKind::Heatmap),
            other => Err(Error::Config(format!("unknown svg kind {other:?} (expected lines or heatmap)"))),
        }
    }
}

/// One negativity column of a [`NegativityReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Tri,
    Bipart(usize),
    Pair(usize),
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::Tri,
        Quantity::Bipart(0),
        Quantity::Bipart(1),
        Quantity::Bipart(2),
        Quantity::Pair(0),
        Quantity::Pair(1),
        Quantity::Pair(2),
    ];

    /// CSV column name.
    pub fn column(self) -> &'static str {
        match self {
            Quantity::Tri => "N_ABC",
            Quantity::Bipart(0) => "N_A_BC",
            Quantity::Bipart(1) => "N_B_AC",
            Quantity::Bipart(_) => "N_C_AB",
            Quantity::Pair(0) => "N_AB",
            Quantity::Pair(1) => "N_AC",
            Quantity::Pair(_) => "N_BC",
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Quantity::Tri => "N_ABC",
            Quantity::Bipart(0) => "N_A|BC",
            Quantity::Bipart(1) => "N_B|AC",
            Quantity::Bipart(_) => "N_C|AB",
            Quantity::Pair(0) => "N_A|B",
            Quantity::Pair(1) => "N_A|C",
            Quantity::Pair(_) => "N_B|C",
        }
    }

    pub fn of(self, r: &NegativityReport) -> f64 {
        match self {
            Quantity::Tri => r.n_tri,
            Quantity::Bipart(k) => r.n_bipart[k],
            Quantity::Pair(k) => r.n_pair[k],
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase();
        Quantity::ALL
            .into_iter()
            .find(|q| q.column() == key || q.symbol() == key)
            .ok_or_else(|| Error::Config(format!("unknown quantity {s:?}")))
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn num(x: f64) -> String {
    format!("{x:.2}")
}

/// Linear map of `[lo, hi]` onto `[a, b]`, collapsing to the midpoint
/// when the source range is empty.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        0.5 * (a + b)
    }
}

/// Sequential colormap from pale yellow (0) to dark blue (1).
fn color(u: f64) -> String {
    let u = if u.is_finite() { u.clamp(0.0, 1.0) } else { 0.0 };
    let stops = [(255.0, 255.0, 204.0), (65.0, 182.0, 196.0), (8.0, 29.0, 88.0)];
    let (c0, c1, f) = if u < 0.5 { (stops[0], stops[1], u * 2.0) } else { (stops[1], stops[2], u * 2.0 - 1.0) };
    let mix = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(c0.0, c1.0), mix(c0.1, c1.1), mix(c0.2, c1.2))
}

struct Frame {
    body: String,
}

impl Frame {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(body, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(body, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, num(plot_cx()), escape(title));
        Frame { body }
    }

    fn axes(&mut self, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64)) {
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            self.body,
            r#"<g class="axes" stroke="black" fill="none"><line x1="{}" y1="{}" x2="{}" y2="{}"/><line x1="{}" y1="{}" x2="{}" y2="{}"/></g>"#,
            num(x0), num(y0), num(x1), num(y0), num(x0), num(y0), num(x0), num(y1)
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = x_range.0 + f * (x_range.1 - x_range.0);
            let yv = y_range.0 + f * (y_range.1 - y_range.0);
            let xp = x0 + f * (x1 - x0);
            let yp = y0 + f * (y1 - y0);
            let _ = writeln!(
                self.body,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text><text x="{}" y="{}" text-anchor="end">{}</text>"#,
                num(xp), num(y0 + 18.0), tick(xv), num(x0 - 6.0), num(yp + 4.0), tick(yv)
            );
        }
        let _ = writeln!(
            self.body,
            r#"<text class="xlabel" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num(plot_cx()), num(HEIGHT - 12.0), escape(x_label)
        );
        let _ = writeln!(
            self.body,
            r#"<text class="ylabel" x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            num(plot_cy()), num(plot_cy()), escape(y_label)
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn plot_cx() -> f64 {
    0.5 * (LEFT + WIDTH - RIGHT)
}

fn plot_cy() -> f64 {
    0.5 * (TOP + HEIGHT - BOTTOM)
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn value_range<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let hi = values.copied().filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    (0.0, if hi > 0.0 { hi } else { 1.0 })
}

fn polyline(body: &mut String, points: &[(f64, f64)], stroke: &str, data_axis: f64) {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
    let _ = writeln!(
        body,
        r#"<polyline data-axis="{data_axis}" fill="none" stroke="{stroke}" stroke-width="1.5" points="{}"/>"#,
        pts.join(" ")
    );
}

fn legend(body: &mut String, entries: &[(String, &str)]) {
    let x = WIDTH - RIGHT + 16.0;
    let _ = writeln!(body, r#"<g class="legend">"#);
    for (k, (label, stroke)) in entries.iter().enumerate() {
        let y = TOP + 10.0 + 16.0 * k as f64;
        let _ = writeln!(
            body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            num(x), num(y), num(x + 18.0), num(y), num(x + 24.0), num(y + 4.0), escape(label)
        );
    }
    let _ = writeln!(body, "</g>");
}

pub(crate) fn render_svg(result: &ScanResult, kind: SvgKind, quantity: Quantity) -> Result<String> {
    if result.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let values: Vec<Vec<f64>> = result.cells.iter().map(|row| row.iter().map(|r| quantity.of(r)).collect()).collect();
    let (v_lo, v_hi) = value_range(values.iter().flatten());
    let t_range = (result.times[0], *result.times.last().expect("non-empty"));
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let symbol = quantity.symbol();

    match kind {
        SvgKind::Lines => {
            let mut frame = Frame::new(&format!("{symbol} vs time"));
            frame.axes("t (1/γ)", symbol, t_range, (v_lo, v_hi));
            let mut entries = Vec::new();
            for (k, (a, row)) in result.axis.iter().zip(&values).enumerate() {
                let stroke = PALETTE[k % PALETTE.len()];
                let pts: Vec<(f64, f64)> = result
                    .times
                    .iter()
                    .zip(row)
                    .map(|(&t, &v)| (scale(t, t_range.0, t_range.1, x0, x1), scale(v, v_lo, v_hi, y0, y1)))
                    .collect();
                polyline(&mut frame.body, &pts, stroke, a.value);
                entries.push((a.label.clone(), stroke));
            }
            legend(&mut frame.body, &entries);
            Ok(frame.finish())
        }
        SvgKind::Heatmap => {
            let mut frame = Frame::new(&format!("{symbol} over {} and time", result.kind.label()));
            let a_range = (result.axis[0].value, result.axis.last().expect("non-empty").value);
            let n_t = result.times.len();
            let n_a = result.axis.len();
            let cw = (x1 - x0) / n_t as f64;
            let ch = (y0 - y1) / n_a as f64;
            let _ = writeln!(frame.body, r#"<g class="heatmap" shape-rendering="crispEdges">"#);
            for (i, (a, row)) in result.axis.iter().zip(&values).enumerate() {
                for (j, (&t, &v)) in result.times.iter().zip(row).enumerate() {
                    let _ = writeln!(
                        frame.body,
                        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" data-axis="{}" data-t="{}" data-value="{:e}"/>"#,
                        num(x0 + j as f64 * cw),
                        num(y0 - (i + 1) as f64 * ch),
                        num(cw + 0.05),
                        num(ch + 0.05),
                        color(scale(v, v_lo, v_hi, 0.0, 1.0)),
                        a.value,
                        t,
                        v
                    );
                }
            }
            let _ = writeln!(frame.body, "</g>");
            frame.axes("t (1/γ)", result.kind.label(), t_range, a_range);
            colorbar(&mut frame.body, symbol, v_lo, v_hi);
            Ok(frame.finish())
        }
    }
}

fn colorbar(body: &mut String, symbol: &str, lo: f64, hi: f64) {
    let x = WIDTH - RIGHT + 30.0;
    let (top, bottom) = (TOP + 10.0, HEIGHT - BOTTOM);
    let n = 32;
    let h = (bottom - top) / n as f64;
    let _ = writeln!(body, r#"<g class="colorbar">"#);
    for k in 0..n {
        let u = (k as f64 + 0.5) / n as f64;
        let _ = writeln!(
            body,
            r#"<rect x="{}" y="{}" width="18" height="{}" fill="{}"/>"#,
            num(x),
            num(bottom - (k + 1) as f64 * h),
            num(h + 0.05),
            color(u)
        );
    }
    let _ = writeln!(
        body,
        r#"<text x="{}" y="{}">{}</text><text x="{}" y="{}">{}</text><text x="{}" y="{}">{}</text></g>"#,
        num(x + 24.0), num(bottom), tick(lo), num(x + 24.0), num(top + 8.0), tick(hi), num(x), num(top - 4.0), escape(symbol)
    );
}

pub(crate) fn render_superposition_svg(scan: &SuperpositionScan) -> Result<String> {
    if scan.results.iter().all(ScanResult::is_empty) {
        return Err(Error::EmptyGrid);
    }
    let (v_lo, v_hi) = value_range(scan.results.iter().flat_map(|r| r.cells.iter().map(|c| &c[0].n_tri)));
    let p_lo = scan.results.iter().flat_map(|r| r.axis.iter().map(|a| a.value)).fold(f64::INFINITY, f64::min);
    let p_hi = scan.results.iter().flat_map(|r| r.axis.iter().map(|a| a.value)).fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let mut frame = Frame::new(&format!("N_ABC at t = {} (1/γ)", tick(scan.t_eval)));
    frame.axes("GHZ weight p", "N_ABC", (p_lo, p_hi), (v_lo, v_hi));
    let mut entries = Vec::new();
    for (k, (point, res)) in scan.points.iter().zip(&scan.results).enumerate() {
        let stroke = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = res
            .axis
            .iter()
            .zip(&res.cells)
            .map(|(a, c)| (scale(a.value, p_lo, p_hi, x0, x1), scale(c[0].n_tri, v_lo, v_hi, y0, y1)))
            .collect();
        polyline(&mut frame.body, &pts, stroke, k as f64);
        entries.push((point.label.clone(), stroke));
    }
    legend(&mut frame.body, &entries);
    Ok(frame.finish())
}

fn write(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// SVG chart of `N_ABC`. An empty grid is an error and nothing is written.
pub fn emit_svg(result: &ScanResult, kind: SvgKind, path: &Path) -> Result<()> {
    emit_svg_quantity(result, kind, Quantity::Tri, path)
}

pub fn emit_svg_quantity(result: &ScanResult, kind: SvgKind, quantity: Quantity, path: &Path) -> Result<()> {
    write(path, render_svg(result, kind, quantity)?)
}

/// `N_ABC` against `p`, one line per correlation point.
pub fn emit_superposition_svg(scan: &SuperpositionScan, path: &Path) -> Result<()> {
    write(path, render_superposition_svg(scan)?)
}
