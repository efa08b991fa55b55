//! Minimal static line charts.

use std::fmt::Write;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub values: &'a [f64],
}

pub struct Panel<'a> {
    pub title: &'a str,
    pub series: Vec<Series<'a>>,
}

const WIDTH: f64 = 800.0;
const PANEL_HEIGHT: f64 = 280.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 110.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 40.0;

/// Panels stacked vertically, all sharing the abscissa `t`.
pub fn render(t: &[f64], panels: &[Panel]) -> String {
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (t0, t1) = range(t.iter().copied());
    for (p, panel) in panels.iter().enumerate() {
        let top = p as f64 * PANEL_HEIGHT + MARGIN_T;
        let plot_h = PANEL_HEIGHT - MARGIN_T - MARGIN_B;
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let (v0, v1) = range(panel.series.iter().flat_map(|s| s.values.iter().copied()));
        let sx = |v: f64| MARGIN_L + (v - t0) / (t1 - t0) * plot_w;
        let sy = |v: f64| top + plot_h - (v - v0) / (v1 - v0) * plot_h;
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_L}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(out, r#"<text x="{MARGIN_L}" y="{:.1}">{}</text>"#, top - 8.0, escape(panel.title));
        for (i, v) in [v0, 0.5 * (v0 + v1), v1].iter().enumerate() {
            let y = sy(*v);
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, MARGIN_L - 6.0, y + 4.0, tick(*v));
            if i == 1 {
                let _ = writeln!(
                    out,
                    r##"<line x1="{MARGIN_L}" x2="{:.1}" y1="{y:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
                    MARGIN_L + plot_w
                );
            }
        }
        for v in [t0, 0.5 * (t0 + t1), t1] {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                sx(v),
                top + plot_h + 16.0,
                tick(v)
            );
        }
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">t</text>"#, MARGIN_L + plot_w / 2.0, top + plot_h + 32.0);
        for (k, s) in panel.series.iter().enumerate() {
            let mut pts = String::new();
            for (tv, v) in t.iter().zip(s.values) {
                let _ = write!(pts, "{:.2},{:.2} ", sx(*tv), sy(*v));
            }
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                s.color,
                pts.trim_end()
            );
            let ly = top + 14.0 + 16.0 * k as f64;
            let lx = MARGIN_L + plot_w + 10.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx}" x2="{:.1}" y1="{ly:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 18.0,
                s.color,
                lx + 22.0,
                ly + 4.0,
                escape(s.label)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        let pad = 0.5 * hi.abs().max(1e-3);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_polyline_per_series() {
        let t = [0.0, 1.0, 2.0];
        let a = [1.0, 2.0, 3.0];
        let b = [0.5, 0.5, 0.5];
        let svg = render(
            &t,
            &[
                Panel { title: "states", series: vec![Series { label: "x", color: "red", values: &a }, Series { label: "y", color: "blue", values: &b }] },
                Panel { title: "delay", series: vec![Series { label: "tau", color: "black", values: &b }] },
            ],
        );
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("NaN"));
    }
}
