//! Static SVG line charts of aggregated errors.

use std::fmt::Write;

use sparse_qubo::Metric;

use crate::aggregate::AggregateRow;
use crate::config::Method;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Series {
    method: Method,
    points: Vec<(f64, f64, f64)>,
}

/// Mean of `metric` against the sweep value, one polyline per method (rows tuned for
/// `metric` only), with ±1 standard-error bars.
pub fn line_chart(
    aggregates: &[AggregateRow],
    metric: Metric,
    x_label: &str,
    title: &str,
) -> String {
    let mut series: Vec<Series> = Vec::new();
    for a in aggregates.iter().filter(|a| a.tuned_for == metric) {
        let point = (a.sweep_value, a.mean(metric), a.stderr(metric));
        match series.iter_mut().find(|s| s.method == a.method) {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                method: a.method,
                points: vec![point],
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|p, q| p.0.total_cmp(&q.0));
    }

    let all: Vec<&(f64, f64, f64)> = series.iter().flat_map(|s| &s.points).collect();
    let (mut x_lo, mut x_hi) = bounds(all.iter().map(|p| p.0));
    let (_, mut y_hi) = bounds(all.iter().map(|p| p.1 + p.2));
    let mut y_lo = 0.0_f64.min(bounds(all.iter().map(|p| p.1 - p.2)).0);
    if all.is_empty() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_hi <= x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    y_hi *= 1.05;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<g stroke="black" fill="none"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/></g>"#,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    );
    for i in 0..=5 {
        let xv = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let yv = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(xv),
            MARGIN_TOP + plot_h + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{} error</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        metric.name()
    );

    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-method="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            s.method,
            pts.join(" ")
        );
        for p in &s.points {
            let (x, lo, hi) = (sx(p.0), sy(p.1 - p.2), sy(p.1 + p.2));
            let _ = writeln!(
                svg,
                r#"<line class="errorbar" x1="{x:.2}" y1="{lo:.2}" x2="{x:.2}" y2="{hi:.2}" stroke="{color}"/>"#
            );
            let _ = writeln!(
                svg,
                r#"<circle cx="{x:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sy(p.1)
            );
        }
        let ly = MARGIN_TOP + 10.0 + 20.0 * idx as f64;
        let lx = MARGIN_LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            s.method
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 1e4) {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agg(method: Method, value: f64, mean: f64) -> AggregateRow {
        AggregateRow {
            method,
            tuned_for: Metric::Reconstruction,
            sweep_value: value,
            count: 3,
            reconstruction_mean: mean,
            reconstruction_stderr: 0.1,
            support_mean: 1.0,
            support_stderr: 0.0,
        }
    }

    #[test]
    fn empty_chart_has_no_series() {
        let svg = line_chart(&[], Metric::Reconstruction, "M", "empty");
        assert!(svg.starts_with("<svg"));
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn two_methods_three_points() {
        let mut rows = Vec::new();
        for v in [4.0, 6.0, 8.0] {
            rows.push(agg(Method::Omp, v, 1.0 / v));
            rows.push(agg(Method::Lasso, v, 2.0 / v));
        }
        let svg = line_chart(&rows, Metric::Reconstruction, "M", "t");
        let lines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
        assert_eq!(lines.len(), 2);
        for l in lines {
            let points = l
                .split("points=\"")
                .nth(1)
                .unwrap()
                .trim_end_matches("\"/>");
            assert_eq!(points.split(' ').count(), 3);
        }
        // support chart ignores rows tuned for reconstruction
        assert!(!line_chart(&rows, Metric::Support, "M", "t").contains("<polyline"));
    }

    #[test]
    fn escapes_text() {
        assert!(line_chart(&[], Metric::Support, "a<b", "x & y").contains("a&lt;b"));
    }
}
