//! Self-contained log-log scatter plots with reference slope lines.

use std::fmt::Write as _;

/// A dashed reference line `y = c x^slope`, anchored at the first data point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLine {
    /// Exponent.
    pub slope: f64,
    /// Legend text.
    pub label: String,
}

/// Plot description.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogPlot {
    /// Title.
    pub title: String,
    /// x-axis label.
    pub x_label: String,
    /// y-axis label.
    pub y_label: String,
    /// Data, all positive.
    pub points: Vec<(f64, f64)>,
    /// Reference lines.
    pub references: Vec<ReferenceLine>,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 70.0;
const COLORS: [&str; 4] = ["#d62728", "#2ca02c", "#9467bd", "#8c564b"];

fn decade_bounds(lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = (lo.log10().floor(), hi.log10().ceil());
    if a == b {
        (a - 1.0, b + 1.0)
    } else {
        (a, b)
    }
}

impl LogLogPlot {
    /// Renders the plot as an SVG document. Non-positive points are dropped.
    pub fn render(&self) -> String {
        let pts: Vec<(f64, f64)> = self.points.iter().copied().filter(|&(x, y)| x > 0.0 && y > 0.0).collect();
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(&self.title));
        if pts.is_empty() {
            s.push_str("</svg>\n");
            return s;
        }
        let (xmin, xmax) = pts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (ymin, ymax) = pts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let (x0, x1) = decade_bounds(xmin, xmax);
        let (y0, y1) = decade_bounds(ymin, ymax);
        let px = |x: f64| MARGIN + (x.log10() - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let py = |y: f64| H - MARGIN - (y.log10() - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

        // axes and decade ticks
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * MARGIN,
            H - 2.0 * MARGIN
        );
        for e in x0 as i32..=x1 as i32 {
            let x = px(10f64.powi(e));
            let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, H - MARGIN, H - MARGIN + 5.0);
            let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{e}</text>"#, H - MARGIN + 18.0);
        }
        for e in y0 as i32..=y1 as i32 {
            let y = py(10f64.powi(e));
            let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{MARGIN}" y2="{y:.2}" stroke="black"/>"#, MARGIN - 5.0);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"#, MARGIN - 8.0, y + 4.0);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 20.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(&self.y_label)
        );

        let _ = writeln!(s, r#"<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}"/></clipPath>"#, W - 2.0 * MARGIN, H - 2.0 * MARGIN);
        let (ax, ay) = pts[0];
        for (i, r) in self.references.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let y_at = |x: f64| ay * (x / ax).powf(r.slope);
            let (xa, xb) = (10f64.powf(x0), 10f64.powf(x1));
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="6 4" clip-path="url(#plot)"/>"#,
                px(xa),
                py(y_at(xa)),
                px(xb),
                py(y_at(xb))
            );
            let ly = MARGIN + 16.0 + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-dasharray="6 4"/><text x="{}" y="{}">{}</text>"#,
                W - MARGIN - 150.0,
                W - MARGIN - 120.0,
                W - MARGIN - 115.0,
                ly + 4.0,
                escape(&r.label)
            );
        }
        for &(x, y) in &pts {
            let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#1f77b4"/>"##, px(x), py(y));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Error against `M` with lines `M^{-α/2}`, `M^{-3α/4}`, `M^{-α}`.
pub fn error_vs_budget(points: Vec<(f64, f64)>, alpha: f64, function: &str) -> LogLogPlot {
    LogLogPlot {
        title: format!("{function}: L2 error vs M (alpha = {alpha})"),
        x_label: "M".into(),
        y_label: "L2 error".into(),
        points,
        references: vec![
            ReferenceLine { slope: -alpha / 2.0, label: "M^(-a/2)".into() },
            ReferenceLine { slope: -0.75 * alpha, label: "M^(-3a/4)".into() },
            ReferenceLine { slope: -alpha, label: "M^(-a)".into() },
        ],
    }
}

/// Error against `N_*` with the line `N_*^{-α}`.
pub fn error_vs_nstar(points: Vec<(f64, f64)>, alpha: f64, function: &str) -> LogLogPlot {
    LogLogPlot {
        title: format!("{function}: L2 error vs N_* (alpha = {alpha})"),
        x_label: "N_*".into(),
        y_label: "L2 error".into(),
        points,
        references: vec![ReferenceLine { slope: -alpha, label: "N_*^(-a)".into() }],
    }
}

/// `N_*` against `M` with a slope-one line.
pub fn nstar_vs_budget(points: Vec<(f64, f64)>) -> LogLogPlot {
    LogLogPlot {
        title: "N_* vs M".into(),
        x_label: "M".into(),
        y_label: "N_*".into(),
        points,
        references: vec![ReferenceLine { slope: 1.0, label: "M^1".into() }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_every_point_and_line() {
        let pts = vec![(1e3, 1e-2), (1e4, 1e-3), (1e5, 2e-5)];
        let svg = error_vs_budget(pts, 1.5, "f1").render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("stroke-dasharray").count(), 6);
    }

    #[test]
    fn empty_plot_is_valid() {
        let svg = nstar_vs_budget(vec![(0.0, 1.0)]).render();
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 0);
    }
}
