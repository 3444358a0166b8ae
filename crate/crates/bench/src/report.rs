//! CSV traces, their metadata sidecar, and the SVG comparison plot.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use proxvr::metrics::traces_to_csv;
use proxvr::RunTrace;

use crate::error::{BenchError, Result};
use crate::experiment::Summary;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Writes `solver,seed,passes,ifo,po,F,subopt,gmap_sq` rows. An empty trace
/// set is an error and leaves no file behind.
pub fn emit_csv(traces: &[RunTrace], path: &Path) -> Result<()> {
    if traces.is_empty() {
        return Err(BenchError::Empty("no traces"));
    }
    let text = traces_to_csv(traces)?;
    std::fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

/// `<trace>.meta`: one line per run with the settings the CSV cannot hold.
pub fn meta_path(trace: &Path) -> PathBuf {
    let mut name = trace.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

pub fn render_meta(traces: &[RunTrace]) -> String {
    let mut out = String::from("solver\tseed\tgmap_eta\tplan\n");
    for t in traces {
        let eta = t.meta.eta.map_or(String::new(), |e| format!("{e:e}"));
        let _ = writeln!(out, "{}\t{}\t{eta}\t{}", t.meta.solver, t.meta.seed, t.meta.plan);
    }
    out
}

pub fn emit_meta(traces: &[RunTrace], trace_path: &Path) -> Result<()> {
    let path = meta_path(trace_path);
    std::fs::write(&path, render_meta(traces)).map_err(|e| BenchError::io(path, e))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Maps data coordinates into the plot area. Larger `y` is higher on screen,
/// so screen `y` shrinks as the data grows.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn sy(&self, y: f64) -> f64 {
        TOP + (self.y.1 - y) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo > 1e-12 {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Plottable `(passes, log10 subopt)` points; nonpositive suboptimality has
/// no logarithm and is left out.
fn log_points(summary: &Summary) -> Vec<(&str, Vec<(f64, f64)>)> {
    summary
        .curves
        .iter()
        .map(|c| {
            let pts = c
                .points
                .iter()
                .filter(|p| p.subopt > 0.0 && p.passes.is_finite())
                .map(|p| (p.passes, p.subopt.log10()))
                .collect();
            (c.solver.as_str(), pts)
        })
        .collect()
}

/// Line chart of `log10` suboptimality against effective passes, one
/// polyline per solver.
pub fn render_svg(summary: &Summary) -> Result<String> {
    if summary.curves.is_empty() {
        return Err(BenchError::Empty("summary has no curves"));
    }
    let series = log_points(summary);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let fold = |f: fn(&(f64, f64)) -> f64| {
        all.iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x, y) = if all.is_empty() {
        ((0.0, 1.0), (0.0, 1.0))
    } else {
        let (xl, xh) = fold(|p| p.0);
        let (yl, yh) = fold(|p| p.1);
        (padded(xl, xh), padded(yl.floor(), yh.ceil()))
    };
    let frame = Frame { x, y };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y0} V{y1} H{x1}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for k in 0..=4 {
        let xv = frame.x.0 + (frame.x.1 - frame.x.0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            frame.sx(xv),
            y1 + 18.0,
            trim_number(xv)
        );
        let yv = frame.y.0 + (frame.y.1 - frame.y.0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            frame.sy(yv) + 4.0,
            trim_number(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">effective passes</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">log10 suboptimality</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    for (k, (solver, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        if !pts.is_empty() {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(px, py)| format!("{:.2},{:.2}", frame.sx(px), frame.sy(py)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline data-solver="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                escape(solver),
                coords.join(" ")
            );
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(solver));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn trim_number(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

pub fn emit_svg(summary: &Summary, path: &Path) -> Result<()> {
    let text = render_svg(summary)?;
    std::fs::write(path, text).map_err(|e| BenchError::io(path, e))
}
