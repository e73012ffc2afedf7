//! SVG drawing of a matching, coloured by dimer orientation.

use std::fmt::Write;

use crate::graph::{EdgeKind, MatchingConfig, TsscppGraph};
use crate::limit_shape::conjectured_boundary;

const SCALE: f64 = 12.0;
const MARGIN: f64 = 10.0;
const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Rotate the picture by pi/6.
    pub rotate: bool,
    /// Overlay the conjectured arctic circle.
    pub circle: bool,
}

pub fn edge_color(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::Horizontal => "#d62728",
        EdgeKind::Vertical => "#1f77b4",
        EdgeKind::Diagonal => "#2ca02c",
    }
}

struct Frame {
    rotate: bool,
    min_x: f64,
    max_y: f64,
}

impl Frame {
    fn raw(&self, x1: f64, x2: f64) -> (f64, f64) {
        if self.rotate {
            let (c, s) = (SQRT3 / 2.0, 0.5);
            (c * x1 - s * x2, s * x1 + c * x2)
        } else {
            (x1, x2)
        }
    }

    fn to_svg(&self, x1: f64, x2: f64) -> (f64, f64) {
        let (x, y) = self.raw(x1, x2);
        ((x - self.min_x) * SCALE + MARGIN, (self.max_y - y) * SCALE + MARGIN)
    }
}

pub fn render_svg(graph: &TsscppGraph, matching: &MatchingConfig, opts: RenderOptions) -> String {
    let probe = Frame { rotate: opts.rotate, min_x: 0.0, max_y: 0.0 };
    let pts: Vec<(f64, f64)> = graph
        .vertices()
        .iter()
        .map(|v| probe.raw(v.x1 as f64, v.x2 as f64))
        .collect();
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| {
        pts.iter().map(sel).fold(init, f)
    };
    let min_x = fold(f64::min, f64::INFINITY, |p| p.0);
    let max_x = fold(f64::max, f64::NEG_INFINITY, |p| p.0);
    let min_y = fold(f64::min, f64::INFINITY, |p| p.1);
    let max_y = fold(f64::max, f64::NEG_INFINITY, |p| p.1);
    let frame = Frame { rotate: opts.rotate, min_x, max_y };
    let width = (max_x - min_x) * SCALE + 2.0 * MARGIN;
    let height = (max_y - min_y) * SCALE + 2.0 * MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.1}\" height=\"{height:.1}\" viewBox=\"0 0 {width:.1} {height:.1}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(out, "<g stroke-width=\"{:.1}\" stroke-linecap=\"round\">", SCALE * 0.45);
    for (a, b) in matching.edges() {
        let (p, q) = (graph.vertex(a), graph.vertex(b));
        let kind = EdgeKind::of(p, q).expect("matched pairs are edges");
        let (x1, y1) = frame.to_svg(p.x1 as f64, p.x2 as f64);
        let (x2, y2) = frame.to_svg(q.x1 as f64, q.x2 as f64);
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{}\"/>",
            edge_color(kind)
        );
    }
    let _ = writeln!(out, "</g>");
    if opts.circle {
        let n = graph.n() as f64;
        let mut path = Vec::new();
        for k in 0..=200 {
            let x = -2.0 + 2.0 * k as f64 / 200.0;
            let y = conjectured_boundary(x).expect("x in range");
            let (l1, l2) = ((x + 2.0) * n, (SQRT3 * y + 2.0) * n);
            if l2 >= l1 && l2 <= 2.0 * n + 1.0 {
                let (sx, sy) = frame.to_svg(l1, l2);
                path.push(format!("{sx:.2},{sy:.2}"));
            }
        }
        if path.len() > 1 {
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"4 3\"/>",
                path.join(" ")
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
