//! Self-contained SVG charts: a 256-bar grey-level histogram and an
//! adjacent-pixel scatter plot. Output bytes depend only on the input.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use castlab::analysis::CorrelationSample;
use castlab::{Error, Histogram, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="14">{title}</text>"#, WIDTH / 2.0);
}

/// Axes with grey-level ticks on x; y ticks are labelled from `y_max`.
fn axes(out: &mut String, x_label: &str, y_label: &str, y_ticks: &[(f64, String)]) {
    let (x0, y0) = (LEFT, TOP + plot_h());
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(out, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}"/>"#, x0 + plot_w());
    let _ = writeln!(out, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{TOP:.2}"/>"#);
    let _ = writeln!(out, "</g>");
    for level in [0u32, 64, 128, 192, 255] {
        let x = LEFT + (level as f64 + 0.5) / 256.0 * plot_w();
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{level}</text>"#, y0 + 20.0);
    }
    for (frac, label) in y_ticks {
        let y = y0 - frac * plot_h();
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        LEFT + plot_w() / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{y_label}</text>"#,
        TOP + plot_h() / 2.0,
        TOP + plot_h() / 2.0
    );
}

pub fn histogram_svg(h: &Histogram) -> String {
    let max = h.bins.iter().copied().max().unwrap_or(0).max(1) as f64;
    let mut out = String::new();
    header(&mut out, "Grey-level histogram");
    let ticks: Vec<(f64, String)> = [0.0, 0.5, 1.0].iter().map(|&f| (f, format!("{:.0}", f * max))).collect();
    axes(&mut out, "grey level", "pixels", &ticks);
    let bar_w = plot_w() / 256.0;
    let _ = writeln!(out, r#"<g fill="steelblue">"#);
    for (level, &count) in h.bins.iter().enumerate() {
        let bh = count as f64 / max * plot_h();
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            LEFT + level as f64 * bar_w,
            TOP + plot_h() - bh,
            bar_w,
            bh
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

pub fn scatter_svg(s: &CorrelationSample) -> Result<String> {
    if s.pairs.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let mut out = String::new();
    header(&mut out, "Adjacent pixel correlation");
    let ticks: Vec<(f64, String)> =
        [0u32, 64, 128, 192, 255].iter().map(|&l| ((l as f64 + 0.5) / 256.0, l.to_string())).collect();
    axes(&mut out, "grey level at (x, y)", "grey level at adjacent pixel", &ticks);
    let _ = writeln!(out, r#"<g fill="black">"#);
    for &(a, b) in &s.pairs {
        let cx = LEFT + (a as f64 + 0.5) / 256.0 * plot_w();
        let cy = TOP + plot_h() - (b as f64 + 0.5) / 256.0 * plot_h();
        let _ = writeln!(out, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="1.5"/>"#);
    }
    let _ = writeln!(out, "</g>\n</svg>");
    Ok(out)
}

pub fn plot_histogram_svg(h: &Histogram, path: &Path) -> Result<()> {
    fs::write(path, histogram_svg(h))?;
    Ok(())
}

pub fn plot_scatter_svg(s: &CorrelationSample, path: &Path) -> Result<()> {
    fs::write(path, scatter_svg(s)?)?;
    Ok(())
}
