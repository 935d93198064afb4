//! Self-contained SVG line charts of trace CSVs.

use std::fmt::Write;

use crate::output::TraceSeries;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum XAxis {
    Iter,
    Oracle,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum YAxis {
    F,
    FBest,
}

impl XAxis {
    fn column(self) -> &'static str {
        match self {
            XAxis::Iter => "iter",
            XAxis::Oracle => "oracle_calls",
            XAxis::Time => "elapsed_ns",
        }
    }

    fn title(self) -> &'static str {
        match self {
            XAxis::Iter => "iteration",
            XAxis::Oracle => "oracle calls",
            XAxis::Time => "time (s)",
        }
    }

    fn scale(self) -> f64 {
        if self == XAxis::Time {
            1e-9
        } else {
            1.0
        }
    }
}

impl YAxis {
    fn column(self) -> &'static str {
        match self {
            YAxis::F => "f",
            YAxis::FBest => "f_best",
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e5).contains(&v.abs()) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// Evenly spaced ticks on `[lo, hi]`.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

/// Renders the series; errors when there is nothing to draw.
pub fn render(series: &[TraceSeries], x: XAxis, y: YAxis, log_y: bool) -> Result<String, String> {
    let mut lines: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for s in series {
        let xs = s.column(x.column()).ok_or_else(|| format!("{}: no '{}' column", s.label, x.column()))?;
        let ys = s.column(y.column()).ok_or_else(|| format!("{}: no '{}' column", s.label, y.column()))?;
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(&ys)
            .map(|(&a, &b)| (a * x.scale(), b))
            .filter(|(a, b)| a.is_finite() && b.is_finite() && (!log_y || *b > 0.0))
            .map(|(a, b)| (a, if log_y { b.log10() } else { b }))
            .collect();
        if pts.is_empty() {
            return Err(format!("{}: no plottable rows", s.label));
        }
        lines.push((s.label.clone(), pts));
    }
    if lines.is_empty() {
        return Err("no traces given".into());
    }
    let all = lines.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(a, b) in all {
        x0 = x0.min(a);
        x1 = x1.max(a);
        y0 = y0.min(b);
        y1 = y1.max(b);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if log_y {
        y0 = y0.floor();
        y1 = y1.ceil();
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * pw;
    let sy = |v: f64| TOP + (y1 - v) / (y1 - y0) * ph;

    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
    for t in linear_ticks(x0, x1) {
        let px = sx(t);
        writeln!(svg, r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{TOP}" stroke="#dddddd"/>"##, TOP + ph).unwrap();
        writeln!(svg, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, tick_label(t)).unwrap();
    }
    let yticks: Vec<f64> = if log_y {
        let step = ((y1 - y0) / 6.0).ceil().max(1.0);
        let mut v = Vec::new();
        let mut t = y0;
        while t <= y1 + 1e-9 {
            v.push(t);
            t += step;
        }
        v
    } else {
        linear_ticks(y0, y1)
    };
    for t in yticks {
        let py = sy(t);
        let label = if log_y { format!("1e{}", t as i64) } else { tick_label(t) };
        writeln!(svg, r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##, LEFT + pw).unwrap();
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 6.0, py + 4.0).unwrap();
    }
    writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 10.0, x.title()).unwrap();
    let ytitle = if log_y { format!("{} (log)", y.column()) } else { y.column().to_string() };
    writeln!(svg, r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{ytitle}</text>"#, TOP + ph / 2.0, TOP + ph / 2.0).unwrap();
    for (k, (label, pts)) in lines.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = pts.iter().map(|&(a, b)| format!("{:.2},{:.2}", sx(a), sy(b))).collect();
        writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" ")).unwrap();
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        writeln!(svg, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0).unwrap();
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(label)).unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
