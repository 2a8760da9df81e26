//! Static SVG figures: cluster maps, value heatmaps, pass arrows and the
//! lost-ball CDF.
//!
//! Pitch coordinates run 0..100 on both axes with the attacking team moving
//! left to right. Drawing uses a 105 x 68 m pitch at 5 px per metre.

use std::fmt::Write;

use qpass_core::qpass::CdfReport;
use qpass_core::{Clustering, FieldValues, PositionGroup, QPassRecord};

const SCALE: f64 = 5.0;
const MARGIN: f64 = 20.0;
const PITCH_W: f64 = 105.0 * SCALE;
const PITCH_H: f64 = 68.0 * SCALE;
const LEGEND_H: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Own,
    Opp,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Own => "own",
            Side::Opp => "opp",
        }
    }
}

fn px(x: f64) -> f64 {
    MARGIN + x * 1.05 * SCALE
}

fn py(y: f64) -> f64 {
    MARGIN + (100.0 - y) * 0.68 * SCALE
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn open(svg: &mut String, extra_h: f64, title: &str) {
    let w = PITCH_W + 2.0 * MARGIN;
    let h = PITCH_H + 2.0 * MARGIN + extra_h;
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">
<title>{}</title>"#,
        escape(title)
    );
}

/// Outline, halfway line, centre circle, boxes and spots.
fn pitch_markings(svg: &mut String) {
    // metres, origin bottom left
    let m = |x: f64, y: f64| (MARGIN + x * SCALE, MARGIN + (68.0 - y) * SCALE);
    let rect = |svg: &mut String, x0: f64, y0: f64, x1: f64, y1: f64| {
        let (ax, ay) = m(x0, y1);
        let (bx, by) = m(x1, y0);
        let _ = writeln!(
            svg,
            r#"<rect class="marking" x="{ax:.2}" y="{ay:.2}" width="{:.2}" height="{:.2}"/>"#,
            bx - ax,
            by - ay
        );
    };
    svg.push_str(r##"<g id="pitch" fill="none" stroke="#333" stroke-width="1.5">"##);
    svg.push('\n');
    rect(svg, 0.0, 0.0, 105.0, 68.0);
    let (hx, top) = m(52.5, 68.0);
    let (_, bottom) = m(52.5, 0.0);
    let _ = writeln!(svg, r#"<line class="marking" x1="{hx:.2}" y1="{top:.2}" x2="{hx:.2}" y2="{bottom:.2}"/>"#);
    let (cx, cy) = m(52.5, 34.0);
    let _ = writeln!(svg, r#"<circle class="marking" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}"/>"#, 9.15 * SCALE);
    for (near, far, depth) in [(0.0f64, 1.0, 16.5), (0.0, 1.0, 5.5), (105.0, -1.0, 16.5), (105.0, -1.0, 5.5)] {
        let half = if depth > 10.0 { 20.16 } else { 9.16 };
        let inner = near + far * depth;
        rect(svg, near.min(inner), 34.0 - half, near.max(inner), 34.0 + half);
    }
    for x in [11.0, 52.5, 94.0] {
        let (sx, sy) = m(x, 34.0);
        let _ = writeln!(svg, r##"<circle class="marking" cx="{sx:.2}" cy="{sy:.2}" r="1.5" fill="#333"/>"##);
    }
    svg.push_str("</g>\n");
}

type Poly = Vec<(f64, f64)>;

/// Keeps the part of `poly` with `a.p <= b`.
fn clip(poly: &Poly, a: (f64, f64), b: f64) -> Poly {
    let inside = |p: &(f64, f64)| a.0 * p.0 + a.1 * p.1 <= b;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let prev = poly[(i + poly.len() - 1) % poly.len()];
        let (cin, pin) = (inside(&cur), inside(&prev));
        if cin != pin {
            let dp = a.0 * prev.0 + a.1 * prev.1 - b;
            let dc = a.0 * cur.0 + a.1 * cur.1 - b;
            let t = dp / (dp - dc);
            out.push((prev.0 + t * (cur.0 - prev.0), prev.1 + t * (cur.1 - prev.1)));
        }
        if cin {
            out.push(cur);
        }
    }
    out
}

/// Cells of the spatial centroid projections over the pitch, in pitch units.
/// Distances are measured in the clustering's scaled space so each cell is the
/// set of points that nearest-centroid assignment would give that cluster.
pub fn voronoi_cells(clustering: &Clustering) -> Vec<Poly> {
    let weight = |i: usize| {
        let range = clustering.scaler.max[i] - clustering.scaler.min[i];
        if range > 0.0 { 1.0 / (range * range) } else { 0.0 }
    };
    let (wx, wy) = (weight(0), weight(1));
    let sites: Vec<(f64, f64)> = (0..clustering.c())
        .map(|k| {
            let [x, y, _] = clustering.centroid_raw(k);
            (x, y)
        })
        .collect();
    let pitch: Poly = vec![(0.0, 0.0), (100.0, 0.0), (100.0, 100.0), (0.0, 100.0)];
    sites
        .iter()
        .enumerate()
        .map(|(i, &(ax, ay))| {
            let mut cell = pitch.clone();
            for (j, &(bx, by)) in sites.iter().enumerate() {
                if i == j || cell.is_empty() {
                    continue;
                }
                let n = (2.0 * wx * (bx - ax), 2.0 * wy * (by - ay));
                if n.0 == 0.0 && n.1 == 0.0 {
                    // same projection: the lower index keeps the cell
                    if j < i {
                        cell.clear();
                    }
                    continue;
                }
                let rhs = wx * (bx * bx - ax * ax) + wy * (by * by - ay * ay);
                cell = clip(&cell, n, rhs);
            }
            cell
        })
        .collect()
}

fn points_attr(poly: &Poly) -> String {
    let mut s = String::new();
    for (i, (x, y)) in poly.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", px(*x), py(*y));
    }
    s
}

/// Blue at -1, white at 0, red at +1. Values outside are clamped.
pub fn diverging_color(v: f64) -> [u8; 3] {
    let v = if v.is_nan() { 0.0 } else { v.clamp(-1.0, 1.0) };
    let fade = |t: f64| (255.0 * (1.0 - t)).round() as u8;
    if v < 0.0 {
        [fade(-v), fade(-v), 255]
    } else {
        [255, fade(v), fade(v)]
    }
}

fn hex_color(rgb: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2])
}

const PALETTE: [&str; 10] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    "#d9d9d9", "#bc80bd",
];

fn regions(svg: &mut String, cells: &[Poly], fill: impl Fn(usize) -> String, label: impl Fn(usize) -> String) {
    svg.push_str(r##"<g id="regions" stroke="#ffffff" stroke-width="0.5">"##);
    svg.push('\n');
    for (k, cell) in cells.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<polygon class="region" data-cluster="{k}" points="{}" fill="{}"><title>{}</title></polygon>"#,
            points_attr(cell),
            fill(k),
            escape(&label(k))
        );
    }
    svg.push_str("</g>\n");
}

/// One filled cell per cluster.
pub fn render_partition_map(clustering: &Clustering, title: &str) -> String {
    let cells = voronoi_cells(clustering);
    let mut svg = String::new();
    open(&mut svg, 0.0, title);
    regions(
        &mut svg,
        &cells,
        |k| PALETTE[k % PALETTE.len()].to_string(),
        |k| format!("cluster {k}"),
    );
    pitch_markings(&mut svg);
    svg.push_str("</svg>\n");
    svg
}

/// Cells coloured by field value. `Side::Opp` draws the opponent clustering
/// with values `c..2c`.
pub fn render_value_heatmap(clustering: &Clustering, fv: &FieldValues, side: Side, title: &str) -> String {
    let values = match side {
        Side::Own => fv.own_values(),
        Side::Opp => fv.opp_values(),
    };
    let offset = match side {
        Side::Own => 0,
        Side::Opp => fv.c,
    };
    let cells = voronoi_cells(clustering);
    let mut svg = String::new();
    open(&mut svg, LEGEND_H, title);
    regions(
        &mut svg,
        &cells,
        |k| hex_color(diverging_color(values[k])),
        |k| format!("state {}: {:.4}", k + offset, values[k]),
    );
    pitch_markings(&mut svg);
    legend(&mut svg);
    svg.push_str("</svg>\n");
    svg
}

fn legend(svg: &mut String) {
    let y = MARGIN + PITCH_H + 18.0;
    let x0 = MARGIN + PITCH_W / 4.0;
    let width = PITCH_W / 2.0;
    let _ = writeln!(
        svg,
        r##"<defs><linearGradient id="scale" x1="0" x2="1" y1="0" y2="0"><stop offset="0" stop-color="#0000ff"/><stop offset="0.5" stop-color="#ffffff"/><stop offset="1" stop-color="#ff0000"/></linearGradient></defs>
<g id="legend"><rect x="{x0:.2}" y="{y:.2}" width="{width:.2}" height="10" fill="url(#scale)" stroke="#333" stroke-width="0.5"/>
<text x="{x0:.2}" y="{:.2}" text-anchor="middle">-1</text>
<text x="{:.2}" y="{:.2}" text-anchor="middle">0</text>
<text x="{:.2}" y="{:.2}" text-anchor="middle">+1</text></g>"##,
        y + 24.0,
        x0 + width / 2.0,
        y + 24.0,
        x0 + width,
        y + 24.0
    );
}

/// Arrows from start to end; unsuccessful passes are dashed, zero-length
/// passes are dots.
pub fn render_pass_trajectories(records: &[QPassRecord], title: &str) -> String {
    let mut svg = String::new();
    open(&mut svg, 0.0, title);
    svg.push_str(
        r##"<defs><marker id="head" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" fill="context-stroke"/></marker></defs>
"##,
    );
    pitch_markings(&mut svg);
    svg.push_str("<g id=\"passes\" stroke-width=\"1.5\">\n");
    for r in records {
        let (x1, y1, x2, y2) = (px(r.start.x), py(r.start.y), px(r.end.x), py(r.end.y));
        let color = if r.successful { "#1f4e9c" } else { "#c0392b" };
        let tip = format!("{} {} seq {}: {:.4}", r.player_id, r.match_id, r.seq, r.qpass);
        if r.start == r.end {
            let _ = writeln!(
                svg,
                r#"<circle class="pass" cx="{x1:.2}" cy="{y1:.2}" r="3" fill="{color}"><title>{}</title></circle>"#,
                escape(&tip)
            );
            continue;
        }
        let dash = if r.successful { "" } else { r#" stroke-dasharray="6,4""# };
        let _ = writeln!(
            svg,
            r#"<line class="pass" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}"{dash} marker-end="url(#head)"><title>{}</title></line>"#,
            escape(&tip)
        );
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

fn group_color(g: PositionGroup) -> &'static str {
    match g {
        PositionGroup::Goalkeeper => "#1b9e77",
        PositionGroup::Defender => "#7570b3",
        PositionGroup::Midfielder => "#e6ab02",
        PositionGroup::Attacker => "#d95f02",
    }
}

/// Step CDF of lost-ball QPass per position group.
pub fn render_cdf(report: &CdfReport, title: &str) -> String {
    const W: f64 = 560.0;
    const H: f64 = 380.0;
    const L: f64 = 55.0;
    const R: f64 = 150.0;
    const T: f64 = 30.0;
    const B: f64 = 45.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for g in &report.groups {
        for &(q, _) in &g.points {
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    if !lo.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    lo = lo.min(0.0);
    hi = hi.max(0.0);
    if hi - lo < 1e-9 {
        hi = lo + 1.0;
    }
    let plot_w = W - L - R;
    let plot_h = H - T - B;
    let sx = |q: f64| L + (q - lo) / (hi - lo) * plot_w;
    let sy = |f: f64| T + (1.0 - f) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">
<title>{}</title>"#,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r##"<g id="axes" stroke="#333" fill="none"><rect x="{L}" y="{T}" width="{plot_w}" height="{plot_h}"/><line x1="{:.2}" y1="{T}" x2="{:.2}" y2="{:.2}" stroke-dasharray="3,3"/></g>"##,
        sx(0.0),
        sx(0.0),
        T + plot_h
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{f:.2}</text>"#, L - 6.0, sy(f) + 4.0);
        let q = lo + (hi - lo) * f;
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{q:.3}</text>"#, sx(q), T + plot_h + 16.0);
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">QPass of unsuccessful passes</text>"#,
        L + plot_w / 2.0,
        H - 8.0
    );
    for (i, g) in report.groups.iter().enumerate() {
        let mut pts = format!("{:.2},{:.2}", sx(lo), sy(0.0));
        let mut prev = 0.0;
        for &(q, f) in &g.points {
            let _ = write!(pts, " {:.2},{:.2} {:.2},{:.2}", sx(q), sy(prev), sx(q), sy(f));
            prev = f;
        }
        let _ = write!(pts, " {:.2},{:.2}", sx(hi), sy(prev));
        let color = group_color(g.group);
        let _ = writeln!(
            svg,
            r#"<polyline class="cdf" data-group="{}" points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            g.group.code()
        );
        let ly = T + 12.0 + 18.0 * i as f64;
        let lx = L + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{} ({:.1}% &gt; 0)</text>"#,
            lx + 16.0,
            lx + 20.0,
            ly + 4.0,
            g.group.label(),
            100.0 * g.beneficial_fraction
        );
    }
    svg.push_str("</svg>\n");
    svg
}
