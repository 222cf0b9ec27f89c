//! Self-contained SVG plots: a top-down ATE view and grouped bar charts.

use std::fmt::Write as _;

use trajeval_core::{MatchedPairs, RigidTransform, Trajectory};

use crate::record::{EvaluationRecord, Status};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    margin: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>, size: f64, margin: f64) -> Self {
        let (mut min_x, mut max_x, mut min_y, mut max_y) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        if !min_x.is_finite() {
            (min_x, max_x, min_y, max_y) = (0.0, 1.0, 0.0, 1.0);
        }
        let extent = (max_x - min_x).max(max_y - min_y).max(1e-9);
        Frame {
            min_x,
            max_y,
            scale: (size - 2.0 * margin) / extent,
            margin,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.margin + (x - self.min_x) * self.scale,
            self.margin + (self.max_y - y) * self.scale,
        )
    }
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str, width: f64) {
    let mut coords = String::new();
    for (x, y) in points {
        let _ = write!(coords, "{x:.2},{y:.2} ");
    }
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{}"/>"#,
        coords.trim_end()
    );
}

/// Top-down (x-y) view: ground truth, aligned estimate, and one segment per
/// matched pair joining the two positions.
pub fn ate_svg(
    gt: &Trajectory,
    est: &Trajectory,
    pairs: &MatchedPairs,
    alignment: &RigidTransform,
) -> String {
    const SIZE: f64 = 800.0;
    let gt_xy: Vec<(f64, f64)> = gt
        .poses()
        .iter()
        .map(|p| (p.translation().x, p.translation().y))
        .collect();
    let est_xy: Vec<(f64, f64)> = est
        .poses()
        .iter()
        .map(|p| {
            let q = alignment.transform_point(p.translation());
            (q.x, q.y)
        })
        .collect();
    let frame = Frame::fit(gt_xy.iter().chain(&est_xy).copied(), SIZE, 40.0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{h}" viewBox="0 0 {SIZE} {h}">"#,
        h = SIZE + 30.0
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for p in pairs.pairs() {
        let g = p.gt.translation();
        let e = alignment.transform_point(p.est.translation());
        let (x1, y1) = frame.map(g.x, g.y);
        let (x2, y2) = frame.map(e.x, e.y);
        let _ = writeln!(
            out,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#d62728" stroke-width="0.8"/>"##
        );
    }
    let map_all = |pts: &[(f64, f64)]| -> Vec<(f64, f64)> {
        pts.iter().map(|&(x, y)| frame.map(x, y)).collect()
    };
    polyline(&mut out, &map_all(&gt_xy), "#000000", 1.5);
    polyline(&mut out, &map_all(&est_xy), "#1f77b4", 1.5);
    let _ = writeln!(
        out,
        r##"<text x="40" y="{y}" font-family="sans-serif" font-size="14"><tspan fill="#000000">ground truth</tspan>  <tspan fill="#1f77b4">estimate (aligned)</tspan>  <tspan fill="#d62728">difference</tspan></text>"##,
        y = SIZE + 15.0
    );
    out.push_str("</svg>\n");
    out
}

/// One metric panel: the value for each (sequence, algorithm) cell.
pub struct Panel {
    pub title: String,
    pub values: Vec<Vec<Option<f64>>>,
}

fn nice_ceiling(v: f64) -> f64 {
    if v <= 0.0 || !v.is_finite() {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&c| c >= v)
        .unwrap_or(10.0 * mag)
}

/// Grouped bar charts in a two-column grid, one group per sequence and one
/// bar per algorithm.
pub fn grouped_bars_svg(sequences: &[String], algorithms: &[String], panels: &[Panel]) -> String {
    const W: f64 = 520.0;
    const H: f64 = 340.0;
    let cols = 2usize;
    let rows = panels.len().div_ceil(cols);
    let legend_h = 30.0;
    let total_w = W * cols as f64;
    let total_h = H * rows as f64 + legend_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" viewBox="0 0 {total_w} {total_h}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for (k, panel) in panels.iter().enumerate() {
        let ox = (k % cols) as f64 * W;
        let oy = (k / cols) as f64 * H;
        let (left, right, top, bottom) = (60.0, 15.0, 35.0, 70.0);
        let plot_w = W - left - right;
        let plot_h = H - top - bottom;
        let vmax = nice_ceiling(
            panel
                .values
                .iter()
                .flatten()
                .flatten()
                .fold(0.0f64, |a, &b| a.max(b)),
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
            ox + W / 2.0,
            oy + 20.0,
            escape(&panel.title)
        );
        for tick in 0..=4 {
            let v = vmax * tick as f64 / 4.0;
            let y = oy + top + plot_h * (1.0 - tick as f64 / 4.0);
            let _ = writeln!(
                out,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/>"##,
                ox + left,
                ox + left + plot_w
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
                ox + left - 4.0,
                y + 3.0,
                format_tick(v)
            );
        }
        let groups = sequences.len().max(1) as f64;
        let group_w = plot_w / groups;
        let bar_w = group_w * 0.8 / algorithms.len().max(1) as f64;
        for (s, seq) in sequences.iter().enumerate() {
            let gx = ox + left + s as f64 * group_w;
            for (a, _) in algorithms.iter().enumerate() {
                let Some(Some(v)) = panel.values.get(s).and_then(|row| row.get(a)) else {
                    continue;
                };
                let h = plot_h * (v / vmax).clamp(0.0, 1.0);
                let x = gx + group_w * 0.1 + a as f64 * bar_w;
                let y = oy + top + plot_h - h;
                let _ = writeln!(
                    out,
                    r#"<rect x="{x:.2}" y="{y:.2}" width="{bw:.2}" height="{h:.2}" fill="{c}"><title>{v}</title></rect>"#,
                    bw = bar_w,
                    c = PALETTE[a % PALETTE.len()]
                );
            }
            let lx = gx + group_w / 2.0;
            let ly = oy + top + plot_h + 12.0;
            let _ = writeln!(
                out,
                r#"<text x="{lx:.1}" y="{ly:.1}" font-size="10" text-anchor="end" transform="rotate(-30 {lx:.1} {ly:.1})">{}</text>"#,
                escape(seq)
            );
        }
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{y1:.1}" stroke="black"/>"#,
            x = ox + left,
            y0 = oy + top,
            y1 = oy + top + plot_h
        );
        let _ = writeln!(
            out,
            r#"<line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="black"/>"#,
            x0 = ox + left,
            x1 = ox + left + plot_w,
            y = oy + top + plot_h
        );
    }

    let mut lx = 20.0;
    let ly = total_h - 10.0;
    for (a, name) in algorithms.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.1}" y="{:.1}" width="12" height="12" fill="{}"/><text x="{:.1}" y="{ly:.1}" font-size="12">{}</text>"#,
            ly - 11.0,
            PALETTE[a % PALETTE.len()],
            lx + 16.0,
            escape(name)
        );
        lx += 30.0 + 7.0 * name.chars().count() as f64;
    }
    out.push_str("</svg>\n");
    out
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v >= 100.0 {
        format!("{v:.0}")
    } else if v >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.4}")
    }
}

/// Benchmark figure: ATE RMSE, translational and rotational RPE RMSE, and
/// externally supplied runtime when any entry has one.
pub fn benchmark_svg(records: &[EvaluationRecord]) -> String {
    let mut sequences: Vec<String> = Vec::new();
    let mut algorithms: Vec<String> = Vec::new();
    for r in records {
        if !sequences.contains(&r.sequence) {
            sequences.push(r.sequence.clone());
        }
        if !algorithms.contains(&r.algorithm) {
            algorithms.push(r.algorithm.clone());
        }
    }
    let grid = |f: &dyn Fn(&EvaluationRecord) -> Option<f64>| -> Vec<Vec<Option<f64>>> {
        sequences
            .iter()
            .map(|s| {
                algorithms
                    .iter()
                    .map(|a| {
                        records
                            .iter()
                            .find(|r| &r.sequence == s && &r.algorithm == a)
                            .and_then(f)
                    })
                    .collect()
            })
            .collect()
    };
    let ok = |r: &EvaluationRecord| r.status == Status::Ok;
    let mut panels = vec![
        Panel {
            title: "Absolute trajectory error, RMSE (m)".into(),
            values: grid(&|r| ok(r).then(|| r.ate.map(|s| s.rmse)).flatten()),
        },
        Panel {
            title: "Relative pose error, translational RMSE (m)".into(),
            values: grid(&|r| ok(r).then(|| r.rpe_trans_headline()).flatten()),
        },
        Panel {
            title: "Relative pose error, rotational RMSE (rad)".into(),
            values: grid(&|r| ok(r).then(|| r.rpe_rot_headline()).flatten()),
        },
    ];
    if records.iter().any(|r| r.external_runtime_seconds.is_some()) {
        panels.push(Panel {
            title: "Processing time, external (s)".into(),
            values: grid(&|r| r.external_runtime_seconds),
        });
    }
    grouped_bars_svg(&sequences, &algorithms, &panels)
}
