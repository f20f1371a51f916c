//! Two-panel line chart (Re and Im coherence) written as standalone SVG.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const GAP: f64 = 50.0;
const BOTTOM: f64 = 40.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

pub struct Panel<'a> {
    pub title: &'a str,
    pub series: Vec<Series<'a>>,
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn bounds<'a>(it: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = it
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo <= 1e-300 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Four evenly spaced tick values over `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> [f64; 5] {
    std::array::from_fn(|i| lo + (hi - lo) * i as f64 / 4.0)
}

fn panel(out: &mut String, p: &Panel, top: f64, height: f64, x_label: &str) {
    let plot_w = WIDTH - LEFT - RIGHT;
    let (x0, x1) = bounds(p.series.iter().flat_map(|s| s.x.iter()));
    let (y0, y1) = bounds(p.series.iter().flat_map(|s| s.y.iter()));
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| top + height - (y - y0) / (y1 - y0) * height;

    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{top}" width="{plot_w}" height="{height}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        top - 8.0,
        escape(p.title)
    );
    for v in ticks(y0, y1) {
        let y = sy(v);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{v:.3e}</text>"##,
            LEFT + plot_w,
            LEFT - 4.0,
            y + 3.0
        );
    }
    for v in ticks(x0, x1) {
        let x = sx(v);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{v:.2}</text>"#,
            top + height + 13.0
        );
    }
    if !x_label.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            top + height + 30.0,
            escape(x_label)
        );
    }
    for (k, s) in p.series.iter().enumerate() {
        let mut pts = String::new();
        for (x, y) in s.x.iter().zip(s.y) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            escape(s.color),
            pts.trim_end()
        );
        let ly = top + 14.0 + 14.0 * k as f64;
        let lx = WIDTH - RIGHT - 150.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="{}" stroke-width="2"/><text x="{}" y="{ly:.2}" font-size="11">{}</text>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0,
            escape(s.color),
            lx + 25.0,
            escape(s.label)
        );
    }
}

/// Upper and lower panels on a fixed 800×500 canvas.
pub fn two_panel(upper: &Panel, lower: &Panel, x_label: &str) -> String {
    let h = (HEIGHT - TOP - GAP - BOTTOM) / 2.0;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    panel(&mut out, upper, TOP, h, "");
    panel(&mut out, lower, TOP + h + GAP, h, x_label);
    out.push_str("</svg>\n");
    out
}
