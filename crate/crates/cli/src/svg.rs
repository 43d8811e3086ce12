//! Chart-plane rendering of loop traces. Output depends only on the scene, so equal
//! scenes give byte-identical documents.

use std::fmt::Write;

/// Chart axis 1 runs horizontally and axis 0 vertically, so parallels come out level.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    /// `[(lo, hi); 2]` per chart axis.
    pub bounds: [(f64, f64); 2],
    pub periods: [Option<f64>; 2],
    pub loops: Vec<SceneLoop>,
    /// Signed distance samples for shading `U` and drawing its sublevels.
    pub field: Option<SampledField>,
    /// Contour levels drawn from `field` (the boundary is always drawn).
    pub levels: Vec<f64>,
    /// Length or width trace shown as a sparkline.
    pub trace: Vec<f64>,
    pub markers: Vec<[f64; 2]>,
}

#[derive(Debug, Clone)]
pub struct SceneLoop {
    pub label: String,
    pub points: Vec<[f64; 2]>,
    pub emphasis: bool,
}

#[derive(Debug, Clone)]
pub struct SampledField {
    pub n: [usize; 2],
    /// Row-major over axis 0, sampled at cell centres of `bounds`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub stroke: f64,
    pub sparkline: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self { width: 720.0, height: 480.0, margin: 40.0, stroke: 1.2, sparkline: true }
    }
}

struct Frame {
    bounds: [(f64, f64); 2],
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let (a, b) = (self.bounds[1], self.bounds[0]);
        let x = self.x0 + (p[1] - a.0) / (a.1 - a.0) * self.w;
        let y = self.y0 + (p[0] - b.0) / (b.1 - b.0) * self.h;
        (x, y)
    }
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" { "0.00".into() } else { s }
}

/// Moves each breakpoint to the periodic copy nearest its predecessor.
fn unwrap(points: &[[f64; 2]], periods: [Option<f64>; 2]) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(points.len());
    for &p in points {
        let mut q = p;
        if let Some(prev) = out.last() {
            for k in 0..2 {
                if let Some(per) = periods[k] {
                    q[k] -= per * ((q[k] - prev[k]) / per).round();
                }
            }
        }
        out.push(q);
    }
    out
}

fn winds(points: &[[f64; 2]], periods: [Option<f64>; 2]) -> bool {
    let (Some(first), Some(last)) = (points.first(), points.last()) else { return false };
    (0..2).any(|k| periods[k].is_some_and(|per| (first[k] - last[k]).abs() > per / 2.0))
}

fn contour(out: &mut String, frame: &Frame, bounds: [(f64, f64); 2], f: &SampledField, level: f64, class: &str) {
    let [n0, n1] = f.n;
    if n0 < 2 || n1 < 2 {
        return;
    }
    let h = [(bounds[0].1 - bounds[0].0) / n0 as f64, (bounds[1].1 - bounds[1].0) / n1 as f64];
    let at = |i: usize, j: usize| f.values[i * n1 + j] - level;
    let pt = |i: usize, j: usize| [bounds[0].0 + (i as f64 + 0.5) * h[0], bounds[1].0 + (j as f64 + 0.5) * h[1]];
    let cross = |a: [f64; 2], b: [f64; 2], va: f64, vb: f64| {
        let t = va / (va - vb);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    };
    let mut d = String::new();
    for i in 0..n0 - 1 {
        for j in 0..n1 - 1 {
            let c = [pt(i, j), pt(i + 1, j), pt(i + 1, j + 1), pt(i, j + 1)];
            let v = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let mut hits = Vec::new();
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if (v[a] < 0.0) != (v[b] < 0.0) {
                    hits.push(cross(c[a], c[b], v[a], v[b]));
                }
            }
            for pair in hits.chunks_exact(2) {
                let (x1, y1) = frame.map(pair[0]);
                let (x2, y2) = frame.map(pair[1]);
                let _ = write!(d, "M{} {}L{} {}", fmt(x1), fmt(y1), fmt(x2), fmt(y2));
            }
        }
    }
    if !d.is_empty() {
        let _ = writeln!(out, "<path class=\"{class}\" d=\"{d}\"/>");
    }
}

fn shade(out: &mut String, frame: &Frame, f: &SampledField) {
    let [n0, n1] = f.n;
    let (cw, ch) = (frame.w / n1 as f64, frame.h / n0 as f64);
    for i in 0..n0 {
        let mut j = 0;
        while j < n1 {
            if f.values[i * n1 + j] >= 0.0 {
                j += 1;
                continue;
            }
            let start = j;
            while j < n1 && f.values[i * n1 + j] < 0.0 {
                j += 1;
            }
            let _ = writeln!(
                out,
                "<rect class=\"region\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                fmt(frame.x0 + start as f64 * cw),
                fmt(frame.y0 + i as f64 * ch),
                fmt((j - start) as f64 * cw),
                fmt(ch)
            );
        }
    }
}

fn sparkline(out: &mut String, style: &SvgStyle, trace: &[f64]) {
    if trace.len() < 2 {
        return;
    }
    let (bw, bh) = (160.0, 48.0);
    let (x0, y0) = (style.width - style.margin - bw, 6.0);
    let lo = trace.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pts: Vec<String> = trace
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = x0 + bw * i as f64 / (trace.len() - 1) as f64;
            let y = y0 + bh - bh * (v - lo) / span;
            format!("{},{}", fmt(x), fmt(y))
        })
        .collect();
    let _ = writeln!(
        out,
        "<rect class=\"spark-box\" x=\"{}\" y=\"{}\" width=\"{bw}\" height=\"{bh}\"/>",
        fmt(x0),
        fmt(y0)
    );
    let _ = writeln!(out, "<polyline class=\"spark\" points=\"{}\"/>", pts.join(" "));
}

/// Renders the scene as a standalone SVG 1.1 document.
pub fn render_svg(scene: &Scene, style: &SvgStyle) -> String {
    let frame = Frame {
        bounds: scene.bounds,
        x0: style.margin,
        y0: style.margin + if style.sparkline && scene.trace.len() > 1 { 20.0 } else { 0.0 },
        w: style.width - 2.0 * style.margin,
        h: style.height - 2.0 * style.margin - if style.sparkline && scene.trace.len() > 1 { 20.0 } else { 0.0 },
    };
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt(style.width),
        fmt(style.height),
        fmt(style.width),
        fmt(style.height)
    );
    let _ = writeln!(
        out,
        "<style>.axes{{fill:none;stroke:#333;stroke-width:1}}.region{{fill:#f4c9a8;stroke:none}}\
.boundary{{fill:none;stroke:#b35a1f;stroke-width:1}}.level{{fill:none;stroke:#b35a1f;stroke-width:0.6;stroke-dasharray:3 2}}\
.loop{{fill:none;stroke:#4a6fa5;stroke-width:{s}}}.emph{{fill:none;stroke:#c0392b;stroke-width:{e}}}\
.marker{{fill:#c0392b}}.spark-box{{fill:none;stroke:#999;stroke-width:0.5}}.spark{{fill:none;stroke:#333;stroke-width:1}}\
text{{font-family:sans-serif;font-size:10px}}</style>",
        s = fmt(style.stroke),
        e = fmt(2.5 * style.stroke)
    );
    if let Some(f) = &scene.field {
        shade(&mut out, &frame, f);
        contour(&mut out, &frame, scene.bounds, f, 0.0, "boundary");
        for &lv in &scene.levels {
            contour(&mut out, &frame, scene.bounds, f, lv, "level");
        }
    }
    let _ = writeln!(
        out,
        "<rect class=\"axes\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
        fmt(frame.x0),
        fmt(frame.y0),
        fmt(frame.w),
        fmt(frame.h)
    );
    let [(a0, a1), (b0, b1)] = scene.bounds;
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\">x1 {} .. {}</text>",
        fmt(frame.x0),
        fmt(frame.y0 + frame.h + 14.0),
        fmt(b0),
        fmt(b1)
    );
    let _ = writeln!(out, "<text x=\"4\" y=\"{}\">x0 {} .. {}</text>", fmt(frame.y0 - 4.0), fmt(a0), fmt(a1));
    // emphasized loops last so they sit on top
    let mut order: Vec<&SceneLoop> = scene.loops.iter().filter(|l| !l.emphasis).collect();
    order.extend(scene.loops.iter().filter(|l| l.emphasis));
    for l in order {
        if l.points.is_empty() {
            continue;
        }
        let pts = unwrap(&l.points, scene.periods);
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = frame.map(p);
                format!("{},{}", fmt(x), fmt(y))
            })
            .collect();
        let class = if l.emphasis { "emph" } else { "loop" };
        // a loop winding around a periodic axis closes through the chart edge
        let tag = if winds(&pts, scene.periods) { "polyline" } else { "polygon" };
        let _ = writeln!(
            out,
            "<{tag} class=\"{class}\" data-label=\"{}\" points=\"{}\"/>",
            l.label,
            coords.join(" ")
        );
    }
    for &m in &scene.markers {
        let (x, y) = frame.map(m);
        let _ = writeln!(out, "<circle class=\"marker\" cx=\"{}\" cy=\"{}\" r=\"2.5\"/>", fmt(x), fmt(y));
    }
    if style.sparkline {
        sparkline(&mut out, style, &scene.trace);
    }
    out.push_str("</svg>\n");
    out
}
