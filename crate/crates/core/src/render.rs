//! Deterministic SVG drawings of a body, its points, their normal rays,
//! shaded witness regions and the verdict witness.

use std::fmt::Write;

use crate::body::{BoundaryElement, BoundaryPoint, ConvexBody};
use crate::classify::{SectorKindPair, Verdict, VerdictWitness};
use crate::geom::{scalar_to_f64, Closure};
use crate::feasibility::LinearConstraint;
use crate::sectors::{normals_at, Combinator, Sector};

/// `(x0, y0, x1, y1)` in body coordinates.
pub type Window = (f64, f64, f64, f64);

const SIZE: f64 = 640.0;

/// Bounding box grown by half its size on every side.
pub fn default_window(body: &ConvexBody) -> Window {
    let ((x0, y0), (x1, y1)) = body.bbox_f64();
    let (w, h) = ((x1 - x0).max(1e-9), (y1 - y0).max(1e-9));
    (x0 - w / 2.0, y0 - h / 2.0, x1 + w / 2.0, y1 + h / 2.0)
}

struct View {
    win: Window,
    scale: f64,
}

impl View {
    fn new(win: Window) -> Self {
        let (w, h) = (win.2 - win.0, win.3 - win.1);
        View { win, scale: SIZE / w.max(h) }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.win.0) * self.scale, (self.win.3 - y) * self.scale)
    }

    fn width(&self) -> f64 {
        (self.win.2 - self.win.0) * self.scale
    }

    fn height(&self) -> f64 {
        (self.win.3 - self.win.1) * self.scale
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Clips `(origin + t * dir, t >= 0)` to the window.
fn clip_ray(win: &Window, o: (f64, f64), d: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for (p, v, a, b) in [(o.0, d.0, win.0, win.2), (o.1, d.1, win.1, win.3)] {
        if v.abs() < 1e-300 {
            if p < a || p > b {
                return None;
            }
        } else {
            let (t0, t1) = ((a - p) / v, (b - p) / v);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
    }
    (lo <= hi && hi.is_finite()).then(|| ((o.0 + lo * d.0, o.1 + lo * d.1), (o.0 + hi * d.0, o.1 + hi * d.1)))
}

/// Sutherland–Hodgman clip of a convex polygon by `n . p >= c`.
fn clip_half(poly: &[(f64, f64)], n: (f64, f64), c: f64) -> Vec<(f64, f64)> {
    let f = |p: &(f64, f64)| n.0 * p.0 + n.1 * p.1 - c;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fa, fb) = (f(&a), f(&b));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let t = fa / (fa - fb);
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    out
}

fn window_poly(win: &Window) -> Vec<(f64, f64)> {
    vec![(win.0, win.1), (win.2, win.1), (win.2, win.3), (win.0, win.3)]
}

/// Regions of one sector clipped to the window: one polygon per half-plane
/// for unions, one for intersections.
fn sector_regions(s: &Sector, win: &Window) -> Vec<Vec<(f64, f64)>> {
    let halves: Vec<((f64, f64), f64)> = s
        .half_planes()
        .iter()
        .map(|h| {
            let c = LinearConstraint::from_half_plane(h);
            (c.normal.to_f64(), scalar_to_f64(&c.offset))
        })
        .collect();
    match s.combinator {
        Combinator::Union => {
            halves.iter().map(|(n, c)| clip_half(&window_poly(win), *n, *c)).collect()
        }
        Combinator::Intersection => {
            vec![halves.iter().fold(window_poly(win), |poly, (n, c)| clip_half(&poly, *n, *c))]
        }
    }
}

fn path_of(v: &View, poly: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (i, p) in poly.iter().enumerate() {
        let (x, y) = v.map(*p);
        let _ = write!(s, "{}{} {} ", if i == 0 { "M" } else { "L" }, num(x), num(y));
    }
    s.push('Z');
    s
}

fn body_path(v: &View, body: &ConvexBody) -> String {
    let mut s = String::new();
    for (i, e) in body.elements().iter().enumerate() {
        let start = v.map(body.element_start(i).to_f64());
        let end = v.map(body.element_end(i).to_f64());
        if i == 0 {
            let _ = write!(s, "M {} {} ", num(start.0), num(start.1));
        }
        match e {
            BoundaryElement::Segment { .. } => {
                let _ = write!(s, "L {} {} ", num(end.0), num(end.1));
            }
            BoundaryElement::Arc { radius, .. } => {
                let r = scalar_to_f64(radius) * v.scale;
                // Counterclockwise in body coordinates is clockwise on screen.
                let _ = write!(s, "A {} {} 0 0 0 {} {} ", num(r), num(r), num(end.0), num(end.1));
            }
        }
    }
    s.push('Z');
    s
}

/// SVG for the body and points; with a verdict, the sectors of the first
/// nonempty closed test are shaded and the witness is marked.
pub fn render_svg(body: &ConvexBody, pts: &[BoundaryPoint], verdict: Option<&Verdict>, window: Option<Window>) -> String {
    let win = window.unwrap_or_else(|| default_window(body));
    let v = View::new(win);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(v.width()),
        h = num(v.height())
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, num(v.width()), num(v.height()));

    if let Some(verdict) = verdict {
        let kinds = SectorKindPair::for_question(verdict.question);
        let shaded = if verdict.tests.closed_left.is_nonempty() {
            Some(kinds.left)
        } else if verdict.tests.closed_right.is_nonempty() {
            Some(kinds.right)
        } else {
            None
        };
        if let Some(kind) = shaded {
            for bp in pts {
                let Ok(t) = body.tangents_at(bp) else { continue };
                let s = Sector::new(kind, Closure::Closed, &bp.coords, &t);
                for region in sector_regions(&s, &win).iter().filter(|r| r.len() >= 3) {
                    let _ = writeln!(
                        out,
                        r##"<path class="sector" d="{}" fill="#3b7dd8" fill-opacity="0.12" stroke="none"/>"##,
                        path_of(&v, region)
                    );
                }
            }
        }
    }

    let _ = writeln!(
        out,
        r##"<path class="body" d="{}" fill="#e8e8e8" stroke="#202020" stroke-width="1.5"/>"##,
        body_path(&v, body)
    );

    for bp in pts {
        let Ok(t) = body.tangents_at(bp) else { continue };
        let (nl, nr) = normals_at(&bp.coords, &t);
        let lines = if nl.dir.same_ray(&nr.dir) { vec![nl] } else { vec![nl, nr] };
        for l in lines {
            if let Some((a, b)) = clip_ray(&win, l.base.to_f64(), l.dir.to_f64()) {
                let (a, b) = (v.map(a), v.map(b));
                let _ = writeln!(
                    out,
                    r##"<line class="normal" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c03030" stroke-width="1"/>"##,
                    num(a.0),
                    num(a.1),
                    num(b.0),
                    num(b.1)
                );
            }
        }
    }

    for (i, bp) in pts.iter().enumerate() {
        let (x, y) = v.map(bp.coords.to_f64());
        let _ = writeln!(out, r##"<circle class="point" cx="{}" cy="{}" r="4" fill="#202020"/>"##, num(x), num(y));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">a{}</text>"#,
            num(x + 6.0),
            num(y - 6.0),
            i + 1
        );
    }

    match verdict.and_then(|v| v.witness.as_ref()) {
        Some(VerdictWitness::Rotation { center, .. }) => {
            let (x, y) = v.map(center.to_f64());
            let _ = writeln!(
                out,
                r##"<circle class="witness" cx="{}" cy="{}" r="6" fill="none" stroke="#1a8a1a" stroke-width="2"/>"##,
                num(x),
                num(y)
            );
        }
        Some(VerdictWitness::Direction { direction, .. }) => {
            let (dx, dy) = direction.to_f64();
            let n = dx.hypot(dy);
            let (cx, cy) = (v.width() / 2.0, v.height() / 2.0);
            let len = v.width().min(v.height()) / 4.0;
            let (ex, ey) = (cx + len * dx / n, cy - len * dy / n);
            let _ = writeln!(
                out,
                r##"<line class="witness" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#1a8a1a" stroke-width="2"/>"##,
                num(cx),
                num(cy),
                num(ex),
                num(ey)
            );
            let _ = writeln!(
                out,
                r##"<circle class="witness-head" cx="{}" cy="{}" r="4" fill="#1a8a1a"/>"##,
                num(ex),
                num(ey)
            );
        }
        None => {}
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_fix;
    use crate::fixtures::{example_e1, rectangle_remark, square_straddle};

    #[test]
    fn remark_drawing() {
        let f = rectangle_remark();
        let v = classify_fix(&f.body, &f.points).unwrap();
        let svg = render_svg(&f.body, &f.points, Some(&v), None);
        assert_eq!(svg.matches("class=\"normal\"").count(), 3);
        assert_eq!(svg.matches("class=\"witness\"").count(), 1);
        assert!(svg.contains("<line class=\"witness\""));
        assert_eq!(svg, render_svg(&f.body, &f.points, Some(&v), None));
    }

    #[test]
    fn straddle_and_empty() {
        let f = square_straddle();
        let v = classify_fix(&f.body, &f.points).unwrap();
        let svg = render_svg(&f.body, &f.points, Some(&v), None);
        assert_eq!(svg.matches("class=\"normal\"").count(), 4);
        assert!(!svg.contains("witness"));
        let bare = render_svg(&f.body, &[], None, None);
        assert!(bare.contains("class=\"body\"") && !bare.contains("class=\"point\""));
        let e1 = example_e1(3).unwrap();
        assert!(render_svg(&e1.body, &e1.points, None, None).contains(" A "));
    }

    #[test]
    fn ray_clipping() {
        let w = (-1.0, -1.0, 1.0, 1.0);
        let (a, b) = clip_ray(&w, (0.0, 0.0), (1.0, 0.0)).unwrap();
        assert_eq!((a, b), ((0.0, 0.0), (1.0, 0.0)));
        assert!(clip_ray(&w, (2.0, 2.0), (1.0, 0.0)).is_none());
        assert_eq!(clip_half(&window_poly(&w), (1.0, 0.0), 0.0).len(), 4);
    }
}
