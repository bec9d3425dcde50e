//! Diagnostic SVG frames: fixed 800×800 viewport, domain fitted with a margin.

use std::f64::consts::PI;
use std::fmt::Write as _;

use setmotion_core::evolution::MotionFrame;
use setmotion_core::geometry::*;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

struct View {
    lo: Point,
    scale: f64,
}

impl View {
    fn fit(d: &Domain) -> View {
        let (lo, hi) = d.bbox();
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        View { lo, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    // y grows upward in the model, downward in SVG
    fn map(&self, p: Point) -> (f64, f64) {
        (MARGIN + (p.x - self.lo.x) * self.scale, SIZE - MARGIN - (p.y - self.lo.y) * self.scale)
    }
}

fn outline(d: &Domain) -> Vec<Point> {
    match d {
        Domain::Disc { radius } => (0..=256).map(|k| Point::unit(2.0 * PI * k as f64 / 256.0) * *radius).collect(),
        Domain::SymmetricCap { .. } => {
            let root = d.cap_root().unwrap_or(1.0);
            let mut pts: Vec<Point> = (0..=256)
                .map(|k| {
                    let x = -root + 2.0 * root * k as f64 / 256.0;
                    Point::new(x, d.cap_g(x))
                })
                .collect();
            pts.push(Point::new(-root, 0.0));
            pts
        }
        _ => {
            let mut v = d.polygon().unwrap_or_default();
            if let Some(&first) = v.first() {
                v.push(first);
            }
            v
        }
    }
}

fn path(view: &View, pts: &[Point]) -> String {
    let mut s = String::new();
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = view.map(*p);
        let _ = write!(s, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
    }
    s
}

/// Domain outline in grey, free pieces dashed blue, controlled pieces red.
pub fn frame_svg(domain: &Domain, frame: &MotionFrame) -> String {
    let view = View::fit(domain);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#);
    let _ = writeln!(s, r#"<rect width="800" height="800" fill="white"/>"#);
    let _ =
        writeln!(s, r##"<path d="{}" fill="#f2f2f2" stroke="#555" stroke-width="2"/>"##, path(&view, &outline(domain)));
    for a in &frame.boundary.arcs {
        let n = if a.is_segment() { 1 } else { 64 };
        let style = match a.kind {
            ArcKind::Free => r##"stroke="#1f5fbf" stroke-dasharray="8 5""##,
            ArcKind::Controlled => r##"stroke="#c0392b""##,
        };
        let _ = writeln!(s, r#"<path d="{}" fill="none" {style} stroke-width="3"/>"#, path(&view, &a.sample(n)));
    }
    let _ = writeln!(
        s,
        r#"<text x="20" y="28" font-family="monospace" font-size="18">t = {:.6}  area = {:.6}  L = {:.6}</text>"#,
        frame.t, frame.area, frame.rel_perimeter
    );
    s.push_str("</svg>\n");
    s
}
