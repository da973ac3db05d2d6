//! Self-contained SVG phase portraits: fixed 800×600 viewport, 5% data
//! padding, fixed color cycle, one polyline per trajectory with a filled
//! circle at its initial point and a legend. Output bytes are a pure
//! function of the input.

use crate::error::CliError;
use std::fmt::Write as _;

pub struct PlotSeries {
    pub label: String,
    /// (u, u̇) pairs; for systems with N > 1 the caller picks a coordinate.
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 48.0;

const COLORS: [&str; 8] = [
    "#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9", "#f0e442", "#555555",
];

pub fn render_phase_svg(series: &[PlotSeries]) -> Result<String, CliError> {
    if series.is_empty() {
        return Err(CliError::validation(
            "plot",
            "at least one trajectory required",
        ));
    }
    if series.iter().any(|s| s.points.is_empty()) {
        return Err(CliError::validation(
            "plot",
            "every trajectory needs at least one point",
        ));
    }

    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !(xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite()) {
        return Err(CliError::Numeric(
            "non-finite coordinates in plot data".into(),
        ));
    }
    // 5% padding; degenerate ranges get a symmetric unit-ish pad
    let xpad = 0.05 * (xmax - xmin).max(1e-6);
    let ypad = 0.05 * (ymax - ymin).max(1e-6);
    let (x0, x1) = (xmin - xpad, xmax + xpad);
    let (y0, y1) = (ymin - ypad, ymax + ypad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN_BOTTOM - (y - y0) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(svg, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = writeln!(
        svg,
        r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#333333" stroke-width="1"/>"##,
        MARGIN_LEFT, MARGIN_TOP, plot_w, plot_h
    );

    // ticks and grid
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let px = sx(fx);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.3}" y1="{:.3}" x2="{px:.3}" y2="{:.3}" stroke="#dddddd" stroke-width="0.5"/>"##,
            MARGIN_TOP,
            HEIGHT - MARGIN_BOTTOM
        );
        let _ = writeln!(
            svg,
            r##"<text x="{px:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"##,
            HEIGHT - MARGIN_BOTTOM + 16.0,
            tick_label(fx)
        );
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let py = sy(fy);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.3}" y1="{py:.3}" x2="{:.3}" y2="{py:.3}" stroke="#dddddd" stroke-width="0.5"/>"##,
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"##,
            MARGIN_LEFT - 6.0,
            py + 4.0,
            tick_label(fy)
        );
    }
    // axis labels
    let _ = writeln!(
        svg,
        r##"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14" text-anchor="middle">u</text>"##,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="16" y="{:.3}" font-family="sans-serif" font-size="14" text-anchor="middle">u&#775;</text>"##,
        MARGIN_TOP + plot_h / 2.0
    );

    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let mut pts = String::new();
        for &(x, y) in &s.points {
            let _ = write!(pts, "{:.3},{:.3} ", sx(x), sy(y));
        }
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"##,
            pts.trim_end()
        );
        let (fx, fy) = s.points[0];
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.3}" cy="{:.3}" r="4" fill="{color}"/>"##,
            sx(fx),
            sy(fy)
        );
        // legend entry
        let ly = MARGIN_TOP + 14.0 + 18.0 * idx as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{lx:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="2"/>"##,
            ly - 4.0,
            lx + 18.0,
            ly - 4.0
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.3}" y="{ly:.3}" font-family="sans-serif" font-size="12">{}</text>"##,
            lx + 24.0,
            escape_xml(&s.label)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick_label(v: f64) -> String {
    let r = format!("{v:.3}");
    // strip trailing zeros but keep at least one digit
    let r = r.trim_end_matches('0').trim_end_matches('.').to_string();
    if r.is_empty() || r == "-" {
        "0".into()
    } else {
        r
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// First position coordinate against first velocity coordinate.
pub fn phase_points(traj: &grad2_core::Trajectory) -> Vec<(f64, f64)> {
    traj.states.iter().map(|z| (z.x[0], z.y[0])).collect()
}
