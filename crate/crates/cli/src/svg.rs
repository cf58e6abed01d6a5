//! Static SVG diagnostics for `pierce`.

use std::fmt::Write;

use stabbing::{ConvexPolygon, PiercingSet, Point2, Slab2};

/// Failure slabs drawn at most; the rest are only counted.
const MAX_DRAWN_FAILURES: usize = 16;

const POLYGON_FILL: &str = "#dbe9f6";
const POLYGON_STROKE: &str = "#1f4e79";
const MIDLINE: &str = "#7f7f7f";
const RECTANGLE: &str = "#2ca02c";
const ANCHOR: &str = "#ff7f0e";
const POINT: &str = "#9467bd";
const FAILURE: &str = "#d62728";

#[derive(Clone, Copy)]
struct View {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl View {
    fn corners(&self) -> Vec<Point2> {
        vec![
            Point2::new(self.x0, self.y0),
            Point2::new(self.x1, self.y0),
            Point2::new(self.x1, self.y1),
            Point2::new(self.x0, self.y1),
        ]
    }

    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }
}

/// Bounding box of `k` grown by twice its width; a fraction of the diameter
/// (or 1) when the width is zero.
fn viewport(k: &ConvexPolygon, width: f64) -> View {
    let (x0, x1) = k.extent(Point2::new(1.0, 0.0));
    let (y0, y1) = k.extent(Point2::new(0.0, 1.0));
    let diameter = (x1 - x0).hypot(y1 - y0);
    let pad = if width > 0.0 {
        2.0 * width
    } else if diameter > 0.0 {
        0.1 * diameter
    } else {
        1.0
    };
    View {
        x0: x0 - pad,
        y0: y0 - pad,
        x1: x1 + pad,
        y1: y1 + pad,
    }
}

/// Keeps the part of `poly` where `<p, n> <= c`.
fn clip_half_plane(poly: &[Point2], n: Point2, c: f64) -> Vec<Point2> {
    let mut out = Vec::new();
    for (i, &p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        let (sp, sq) = (p.dot(n) - c, q.dot(n) - c);
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            out.push(p + (q - p) * (sp / (sp - sq)));
        }
    }
    out
}

fn slab_in_view(s: &Slab2, view: View) -> Vec<Point2> {
    let upper = clip_half_plane(&view.corners(), s.normal, s.hi);
    clip_half_plane(&upper, -s.normal, -s.lo)
}

/// The line `<p, n> = c` cut to the viewport.
fn line_in_view(n: Point2, c: f64, view: View) -> Option<(Point2, Point2)> {
    let nn = n.dot(n);
    let origin = n * (c / nn);
    let d = n.perp();
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (o, dv, lo, hi) in [(origin.x, d.x, view.x0, view.x1), (origin.y, d.y, view.y0, view.y1)] {
        if dv.abs() <= 1e-15 * nn.sqrt() {
            if o < lo || o > hi {
                return None;
            }
        } else {
            let (a, b) = ((lo - o) / dv, (hi - o) / dv);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t0 <= t1).then(|| (origin + d * t0, origin + d * t1))
}

/// SVG's y axis points down.
fn flip(y: f64) -> f64 {
    0.0 - y
}

fn fmt_points(pts: &[Point2]) -> String {
    pts.iter()
        .map(|p| format!("{:.6},{:.6}", p.x, flip(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders `k`, its minimal slab's middle line, the anchors, the arc
/// parallelograms, the piercing points and up to 16 slabs the points miss.
pub fn render(k: &ConvexPolygon, set: &PiercingSet, failures: &[Slab2]) -> String {
    let view = viewport(k, set.width);
    let sw = view.size() * 0.004;
    let r = view.size() * 0.008;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="800" height="800">"#,
        view.x0,
        flip(view.y1),
        view.x1 - view.x0,
        view.y1 - view.y0
    );
    let _ = writeln!(
        out,
        r#"<rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="white"/>"#,
        view.x0,
        flip(view.y1),
        view.x1 - view.x0,
        view.y1 - view.y0
    );
    for s in failures.iter().take(MAX_DRAWN_FAILURES) {
        let pts = slab_in_view(s, view);
        if pts.len() >= 3 {
            let _ = writeln!(
                out,
                r#"<polygon class="failure" points="{}" fill="{FAILURE}" fill-opacity="0.2" stroke="{FAILURE}" stroke-width="{sw:.6}"/>"#,
                fmt_points(&pts)
            );
        }
    }
    let shape = if k.len() >= 3 { "polygon" } else { "polyline" };
    let _ = writeln!(
        out,
        r#"<{shape} class="polygon" points="{}" fill="{POLYGON_FILL}" stroke="{POLYGON_STROKE}" stroke-width="{sw:.6}"/>"#,
        fmt_points(k.vertices())
    );
    if let Some((a, b)) = line_in_view(set.slab.normal, set.slab.mid(), view) {
        let _ = writeln!(
            out,
            r#"<line class="midline" x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="{MIDLINE}" stroke-width="{sw:.6}" stroke-dasharray="{:.6}"/>"#,
            a.x,
            flip(a.y),
            b.x,
            flip(b.y),
            4.0 * sw
        );
    }
    for rect in &set.rectangles {
        let _ = writeln!(
            out,
            r#"<polygon class="rectangle" points="{}" fill="none" stroke="{RECTANGLE}" stroke-width="{sw:.6}"/>"#,
            fmt_points(&[rect.from, rect.to, rect.e, rect.f])
        );
    }
    if let Some(anchors) = &set.anchors {
        for (name, p) in [("a", anchors.a), ("b", anchors.b), ("c", anchors.c), ("d", anchors.d)] {
            let _ = writeln!(
                out,
                r#"<circle class="anchor" cx="{:.6}" cy="{:.6}" r="{r:.6}" fill="{ANCHOR}"/>"#,
                p.x,
                flip(p.y)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.6}" y="{:.6}" font-size="{:.6}" fill="{ANCHOR}">{name}</text>"#,
                p.x + 1.5 * r,
                flip(p.y) - 1.5 * r,
                4.0 * r
            );
        }
    }
    for p in &set.points {
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{:.6}" cy="{:.6}" r="{:.6}" fill="none" stroke="{POINT}" stroke-width="{sw:.6}"/>"#,
            p.x,
            flip(p.y),
            1.5 * r
        );
    }
    out.push_str("</svg>\n");
    out
}
