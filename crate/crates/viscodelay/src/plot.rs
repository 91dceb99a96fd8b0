//! Static SVG charts of energy series.

use std::fmt::Write;

/// A polyline to draw.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub dashed: bool,
}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 380.0;
const PANEL_W: f64 = 400.0;
const PANEL_H: f64 = 280.0;
const TOP: f64 = 50.0;
const LEFT: [f64; 2] = [70.0, 550.0];
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if lo > hi {
        return None;
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

fn panel(svg: &mut String, x0: f64, title: &str, series: &[Series], log: bool) {
    let transform = |y: f64| if log { if y > 0.0 { y.log10() } else { f64::NAN } } else { y };
    let t_range = range(series.iter().flat_map(|s| s.t.iter().copied()));
    let y_range = range(series.iter().flat_map(|s| s.y.iter().map(|&y| transform(y))));
    let _ = writeln!(
        svg,
        r##"<g class="panel"><rect x="{x0}" y="{TOP}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#333"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        x0 + PANEL_W / 2.0,
        TOP - 12.0,
        escape(title)
    );
    let (Some((t0, t1)), Some((y0, y1))) = (t_range, y_range) else {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">no data</text></g>"#, x0 + PANEL_W / 2.0, TOP + PANEL_H / 2.0);
        return;
    };
    let px = |t: f64| x0 + (t - t0) / (t1 - t0) * PANEL_W;
    let py = |y: f64| TOP + PANEL_H - (y - y0) / (y1 - y0) * PANEL_H;
    let label = |y: f64| if log { format!("1e{y:.1}") } else { format!("{y:.3e}") };
    for (y, anchor_y) in [(y0, TOP + PANEL_H), (y1, TOP + 10.0)] {
        let _ = writeln!(svg, r#"<text x="{}" y="{anchor_y}" text-anchor="end" font-size="11">{}</text>"#, x0 - 4.0, label(y));
    }
    for (t, anchor) in [(t0, "start"), (t1, "end")] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="{anchor}" font-size="11">{t:.3}</text>"#,
            px(t),
            TOP + PANEL_H + 16.0
        );
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">t</text>"#, x0 + PANEL_W / 2.0, TOP + PANEL_H + 32.0);
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        // Break the line wherever a point cannot be drawn (log of non-positive values).
        let mut runs: Vec<Vec<String>> = vec![Vec::new()];
        for (&t, &y) in s.t.iter().zip(&s.y) {
            let y = transform(y);
            if t.is_finite() && y.is_finite() {
                runs.last_mut().expect("non-empty").push(format!("{:.2},{:.2}", px(t), py(y)));
            } else if !runs.last().expect("non-empty").is_empty() {
                runs.push(Vec::new());
            }
        }
        for run in runs.iter().filter(|r| !r.is_empty()) {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                run.join(" ")
            );
        }
        let ly = TOP + 18.0 + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" text-anchor="end" font-size="11" fill="{color}">{}</text>"#,
            x0 + PANEL_W - 6.0,
            escape(&s.label)
        );
    }
    let _ = writeln!(svg, "</g>");
}

/// Two side-by-side panels: the series on a linear axis and on a log axis.
pub fn energy_svg(title: &str, series: &[Series]) -> String {
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    panel(&mut svg, LEFT[0], "E(t), linear scale", series, false);
    panel(&mut svg, LEFT[1], "E(t), log scale", series, true);
    let _ = writeln!(svg, "</svg>");
    svg
}
