//! Minimal SVG rendering. Plots are conveniences; the CSV/JSON artifacts are
//! the contract.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

const SERIES_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn finite_bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn svg_open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        s,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        title
    );
    s
}

fn axes(s: &mut String, x_label: &str, y_label: &str, x0: f64, x1: f64, y0: f64, y1: f64) {
    let bottom = HEIGHT - MARGIN;
    let right = WIDTH - MARGIN;
    let _ = writeln!(
        s,
        "<line x1=\"{MARGIN}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{bottom}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        (MARGIN + right) / 2.0,
        HEIGHT - 16.0,
        x_label
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>",
        (MARGIN + bottom) / 2.0,
        (MARGIN + bottom) / 2.0,
        y_label
    );
    for (value, x, y, anchor) in [
        (x0, MARGIN, bottom + 18.0, "middle"),
        (x1, right, bottom + 18.0, "middle"),
        (y0, MARGIN - 8.0, bottom + 4.0, "end"),
        (y1, MARGIN - 8.0, MARGIN + 4.0, "end"),
    ] {
        let _ = writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{value:.4}</text>"
        );
    }
}

/// Polyline plot of one or more named series over a shared x axis.
/// Non-finite samples break the line.
pub fn line_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    series: &[(&str, Vec<f64>)],
) -> Result<()> {
    let (x0, x1) = finite_bounds(xs.iter().copied());
    let (y0, y1) = finite_bounds(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = svg_open(title);
    axes(&mut s, x_label, y_label, x0, x1, y0, y1);
    for (idx, (name, ys)) in series.iter().enumerate() {
        let color = SERIES_COLORS[idx % SERIES_COLORS.len()];
        let mut segment = String::new();
        let mut points = 0usize;
        let flush = |seg: &mut String, pts: &mut usize, out: &mut String| {
            if *pts >= 2 {
                let _ = writeln!(
                    out,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    seg.trim_end()
                );
            }
            seg.clear();
            *pts = 0;
        };
        for (&x, &y) in xs.iter().zip(ys) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(segment, "{:.2},{:.2} ", sx(x), sy(y));
                points += 1;
            } else {
                flush(&mut segment, &mut points, &mut s);
            }
        }
        flush(&mut segment, &mut points, &mut s);
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{name}</text>",
            WIDTH - MARGIN - 90.0,
            MARGIN + 16.0 * (idx as f64 + 1.0)
        );
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s)?;
    Ok(())
}

fn ramp(t: f64) -> String {
    // Dark blue to warm yellow.
    let t = t.clamp(0.0, 1.0);
    let r = (40.0 + t * (232.0 - 40.0)) as u8;
    let g = (50.0 + t * (190.0 - 50.0)) as u8;
    let b = (140.0 * (1.0 - t) + 55.0 * t) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Cell grid colored by value; `values[i][j]` belongs to `(xs[i], ys[j])`.
pub fn heatmap_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
) -> Result<()> {
    let (v0, v1) = finite_bounds(values.iter().flat_map(|row| row.iter().copied()));
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let cell_w = plot_w / xs.len() as f64;
    let cell_h = plot_h / ys.len() as f64;

    let mut s = svg_open(title);
    axes(
        &mut s,
        x_label,
        y_label,
        xs.first().copied().unwrap_or(0.0),
        xs.last().copied().unwrap_or(1.0),
        ys.first().copied().unwrap_or(0.0),
        ys.last().copied().unwrap_or(1.0),
    );
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let t = if v1 > v0 { (v - v0) / (v1 - v0) } else { 0.0 };
            let x = MARGIN + i as f64 * cell_w;
            let y = HEIGHT - MARGIN - (j as f64 + 1.0) * cell_h;
            let _ = writeln!(
                s,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                cell_w + 0.5,
                cell_h + 0.5,
                ramp(t)
            );
        }
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">range {v0:.4} to {v1:.4}</text>",
        WIDTH - MARGIN - 150.0,
        MARGIN - 8.0
    );
    s.push_str("</svg>\n");
    std::fs::write(path, s)?;
    Ok(())
}
