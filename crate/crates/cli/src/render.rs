//! Static SVG pictures of point sets and embeddings.

use std::fmt::Write as _;

use lshape_core::{AnyTree, Embedding, PointSet, StaircaseSpec};

#[derive(Clone, Debug)]
pub struct RenderSpec {
    /// Grid cell size in px.
    pub cell: f64,
    pub point_radius: f64,
    pub edge_width: f64,
    pub box_width: f64,
    /// Dashed frames around staircase boxes.
    pub boxes: bool,
    /// Vertex labels (or point indices when there is no embedding).
    pub labels: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { cell: 24.0, point_radius: 4.0, edge_width: 2.0, box_width: 1.0, boxes: true, labels: false }
    }
}

impl RenderSpec {
    pub fn check(&self) -> Result<(), String> {
        let all = [self.cell, self.point_radius, self.edge_width, self.box_width];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err("render sizes must be positive".into())
        }
    }
}

pub fn render_svg(
    p: &PointSet,
    boxes: Option<&StaircaseSpec>,
    drawing: Option<(&AnyTree, &Embedding)>,
    spec: &RenderSpec,
) -> String {
    let n = p.len();
    let c = spec.cell;
    let size = (n + 1) as f64 * c;
    // grid (x, y) with y up -> svg coordinates
    let at = |x: i32, y: i32| ((x + 1) as f64 * c, (n as i32 - y) as f64 * c);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.1}" height="{size:.1}" viewBox="0 0 {size:.1} {size:.1}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    if let (Some(b), true) = (boxes, spec.boxes) {
        let _ =
            writeln!(s, r#"<g fill="none" stroke="gray" stroke-width="{:.1}" stroke-dasharray="4 3">"#, spec.box_width);
        let mut first = 0;
        for &len in b.boxes() {
            let (x0, y0) = p.coords(first);
            let (x1, y1) = p.coords(first + len - 1);
            let pad = c * 0.4;
            let (l, t) = at(x0, y1);
            let (r, bot) = at(x1, y0);
            let _ = writeln!(
                s,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}"/>"#,
                l - pad,
                t - pad,
                r - l + 2.0 * pad,
                bot - t + 2.0 * pad
            );
            first += len;
        }
        let _ = writeln!(s, "</g>");
    }

    if let Some((t, e)) = drawing {
        let _ = writeln!(
            s,
            r#"<g fill="none" stroke="black" stroke-width="{:.1}" stroke-linejoin="miter">"#,
            spec.edge_width
        );
        for (k, &(a, b)) in t.base().edges().iter().enumerate() {
            let (ax, ay) = p.coords(e.placement[a]);
            let (bx, by) = p.coords(e.placement[b]);
            let bend = if e.horizontal[k] { (bx, ay) } else { (ax, by) };
            let pts = [(ax, ay), bend, (bx, by)].map(|(x, y)| at(x, y));
            let _ = writeln!(
                s,
                r#"<polyline points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}"/>"#,
                pts[0].0, pts[0].1, pts[1].0, pts[1].1, pts[2].0, pts[2].1
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g fill="black">"#);
    for j in 0..n {
        let (x, y) = at(p.coords(j).0, p.coords(j).1);
        let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="{:.1}"/>"#, spec.point_radius);
    }
    let _ = writeln!(s, "</g>");

    if spec.labels {
        let mut label = vec![String::new(); n];
        match drawing {
            Some((_, e)) => {
                for (v, &j) in e.placement.iter().enumerate() {
                    label[j] = v.to_string();
                }
            }
            None => {
                for (j, l) in label.iter_mut().enumerate() {
                    *l = (j + 1).to_string();
                }
            }
        }
        let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="{:.1}" fill="blue">"#, c * 0.45);
        for (j, l) in label.iter().enumerate() {
            let (x, y) = at(p.coords(j).0, p.coords(j).1);
            let off = spec.point_radius + 2.0;
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{l}</text>"#, x + off, y - off);
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}
