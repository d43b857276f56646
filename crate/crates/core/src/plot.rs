//! Static SVG figures: per-cluster curve panels and affinity heatmaps.

use std::fmt::Write;

use nalgebra::DMatrix;

use crate::dataset::Dataset;

const PANEL_W: f64 = 240.0;
const PANEL_H: f64 = 160.0;
const MARGIN: f64 = 24.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Grid of panels: one column per label, one row per coordinate. Unlabelled
/// curves share a final column.
pub fn curves_svg(d: &Dataset) -> String {
    let classes = d.labels.iter().flatten().max().map_or(0, |m| m + 1);
    let columns = classes + usize::from(d.labels.iter().any(Option::is_none));
    let columns = columns.max(1);
    let rows = d.dim().unwrap_or(1);
    let width = columns as f64 * (PANEL_W + MARGIN) + MARGIN;
    let height = rows as f64 * (PANEL_H + MARGIN) + MARGIN;
    let mut svg = header(width, height);

    for row in 0..rows {
        let values = d.curves.iter().flat_map(|c| c.samples().column(row).iter().copied().collect::<Vec<_>>());
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        for col in 0..columns {
            let x0 = MARGIN + col as f64 * (PANEL_W + MARGIN);
            let y0 = MARGIN + row as f64 * (PANEL_H + MARGIN);
            let _ = writeln!(
                svg,
                "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{PANEL_W}\" height=\"{PANEL_H}\" fill=\"none\" stroke=\"#999\"/>"
            );
            let label = if col < classes { format!("cluster {col}, dim {row}") } else { format!("unlabelled, dim {row}") };
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" font-family=\"sans-serif\">{label}</text>",
                x0 + 4.0,
                y0 - 6.0
            );
            let color = PALETTE[col % PALETTE.len()];
            for (c, l) in d.curves.iter().zip(&d.labels) {
                let column = l.unwrap_or(classes);
                if column != col {
                    continue;
                }
                let t = c.len();
                let mut points = String::new();
                for (s, v) in c.samples().column(row).iter().enumerate() {
                    let px = x0 + PANEL_W * s as f64 / (t - 1) as f64;
                    let py = y0 + PANEL_H * (1.0 - (v - lo) / span);
                    let _ = write!(points, "{px:.2},{py:.2} ");
                }
                let _ = writeln!(
                    svg,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"0.8\" stroke-opacity=\"0.6\"/>",
                    points.trim_end()
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Curve order that groups equal ground-truth labels, keeping the original
/// order inside each group.
pub fn label_order(labels: &[Option<usize>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by_key(|&i| (labels[i].is_none(), labels[i]));
    order
}

/// Grayscale heatmap of `a` with rows and columns permuted by `order`;
/// darker is larger.
pub fn heatmap_svg(a: &DMatrix<f64>, order: &[usize]) -> String {
    let n = order.len();
    let cell = (480.0 / n.max(1) as f64).clamp(2.0, 24.0);
    let side = cell * n as f64 + 2.0 * MARGIN;
    let mut svg = header(side, side);
    let max = order
        .iter()
        .flat_map(|&i| order.iter().map(move |&j| a[(i, j)]))
        .fold(0.0, f64::max);
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    for (r, &i) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            let shade = 255.0 * (1.0 - (a[(i, j)] * scale).clamp(0.0, 1.0));
            let g = shade.round() as u8;
            let _ = writeln!(
                svg,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"rgb({g},{g},{g})\"/>",
                MARGIN + c as f64 * cell,
                MARGIN + r as f64 * cell
            );
        }
    }
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        cell * n as f64,
        cell * n as f64
    );
    svg.push_str("</svg>\n");
    svg
}
