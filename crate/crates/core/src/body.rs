//! Boundary representation of a planar convex body: a closed counterclockwise
//! chain of segments and circular arcs.
//!
//! Polygons are handled exactly. A body containing arcs always runs with a
//! tolerance, since arc junctions generally sit at irrational coordinates;
//! those coordinates are stored as the exact value of their `f64`
//! approximation.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::geom::{
    exact_sqrt, int, scalar_from_f64, scalar_to_f64, Direction, NearDegenerate, Point, Precision,
    RigidMotion, Scalar,
};
use crate::sectors::TangentData;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BodyError {
    #[error("body needs at least two boundary elements")]
    TooFewElements,
    #[error("element {index} is degenerate")]
    DegenerateElement { index: usize },
    #[error("arc element {index} requires tolerant mode")]
    ArcsRequireTolerance { index: usize },
    #[error("boundary is not closed at element {index}")]
    NotClosed { index: usize },
    #[error("boundary is not convex at element {index}")]
    NotConvex { index: usize },
    #[error("boundary is not counterclockwise (element {index})")]
    NotCcw { index: usize },
    #[error("body has empty interior (element {index})")]
    EmptyInterior { index: usize },
    #[error("invalid boundary point on element {element}")]
    InvalidBoundaryPoint { element: usize },
    #[error("point {0} is not on the boundary")]
    NotOnBoundary(Point),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryElement {
    Segment { a: Point, b: Point },
    /// Counterclockwise arc of the circle `(center, radius)` from the ray
    /// `from` to the ray `to`, sweeping strictly less than a half turn.
    Arc { center: Point, radius: Scalar, from: Direction, to: Direction },
}

impl BoundaryElement {
    pub fn segment(a: Point, b: Point) -> Self {
        BoundaryElement::Segment { a, b }
    }

    /// Tangent direction where the element starts.
    pub fn start_tangent(&self) -> Option<Direction> {
        match self {
            BoundaryElement::Segment { a, b } => Direction::new(b - a),
            BoundaryElement::Arc { from, .. } => Some(from.rot90()),
        }
    }

    pub fn end_tangent(&self) -> Option<Direction> {
        match self {
            BoundaryElement::Segment { a, b } => Direction::new(b - a),
            BoundaryElement::Arc { to, .. } => Some(to.rot90()),
        }
    }

    fn transformed(&self, m: &RigidMotion) -> BoundaryElement {
        match self {
            BoundaryElement::Segment { a, b } => BoundaryElement::segment(m.apply(a), m.apply(b)),
            BoundaryElement::Arc { center, radius, from, to } => {
                let lin = |d: &Direction| {
                    Direction::new(&m.apply(&(center + d.vec())) - &m.apply(center)).expect("rigid")
                };
                BoundaryElement::Arc {
                    center: m.apply(center),
                    radius: radius.clone(),
                    from: lin(from),
                    to: lin(to),
                }
            }
        }
    }
}

/// Point of `center + radius * d / |d|`, exact when `|d|` is rational.
fn point_on_circle(center: &Point, radius: &Scalar, d: &Direction) -> Point {
    match exact_sqrt(&d.vec().norm2()) {
        Some(n) => center + &d.vec().scale(&(radius / n)),
        None => {
            let (dx, dy) = d.to_f64();
            let n = dx.hypot(dy);
            let r = scalar_to_f64(radius);
            let (cx, cy) = center.to_f64();
            Point::from_f64(cx + r * dx / n, cy + r * dy / n)
        }
    }
}

fn sweep_angle(from: &Direction, to: &Direction) -> f64 {
    scalar_to_f64(&from.cross(to)).atan2(scalar_to_f64(&from.dot(to)))
}

/// Where a point sits relative to the body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// A point of the boundary addressed by element and parameter in `[0, 1)`.
/// Vertices are addressed by the element that departs from them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundaryPoint {
    pub element: usize,
    pub param: Scalar,
    pub coords: Point,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexBody {
    elements: Vec<BoundaryElement>,
    precision: Precision,
    starts: Vec<Point>,
    ends: Vec<Point>,
}

impl ConvexBody {
    /// Builds and validates a body.
    pub fn new(elements: Vec<BoundaryElement>, precision: Precision) -> Result<Self, BodyError> {
        let (starts, ends) = elements
            .iter()
            .map(|e| match e {
                BoundaryElement::Segment { a, b } => (a.clone(), b.clone()),
                BoundaryElement::Arc { center, radius, from, to } => {
                    (point_on_circle(center, radius, from), point_on_circle(center, radius, to))
                }
            })
            .unzip();
        let body = ConvexBody { elements, precision, starts, ends };
        body.validate()?;
        Ok(body)
    }

    /// Exact polygon from counterclockwise vertices.
    pub fn polygon(vertices: &[Point]) -> Result<Self, BodyError> {
        Self::polygon_with(vertices, Precision::Exact)
    }

    pub fn polygon_with(vertices: &[Point], precision: Precision) -> Result<Self, BodyError> {
        let n = vertices.len();
        let elements = (0..n)
            .map(|i| BoundaryElement::segment(vertices[i].clone(), vertices[(i + 1) % n].clone()))
            .collect();
        Self::new(elements, precision)
    }

    pub fn elements(&self) -> &[BoundaryElement] {
        &self.elements
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_exact()
    }

    pub fn is_polygon(&self) -> bool {
        self.elements.iter().all(|e| matches!(e, BoundaryElement::Segment { .. }))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element_start(&self, i: usize) -> &Point {
        &self.starts[i]
    }

    pub fn element_end(&self, i: usize) -> &Point {
        &self.ends[i]
    }

    /// Element start points, which are the vertices for a polygon.
    pub fn vertices(&self) -> &[Point] {
        &self.starts
    }

    /// Same body with a different predicate precision.
    pub fn with_precision(&self, precision: Precision) -> Result<Self, BodyError> {
        Self::new(self.elements.clone(), precision)
    }

    /// Center and radius when the body is a full disc.
    pub fn full_disc(&self) -> Option<(Point, Scalar)> {
        let mut circle: Option<(&Point, &Scalar)> = None;
        for e in &self.elements {
            match e {
                BoundaryElement::Arc { center, radius, .. } => match circle {
                    None => circle = Some((center, radius)),
                    Some((c, r)) if c == center && r == radius => {}
                    Some(_) => return None,
                },
                BoundaryElement::Segment { .. } => return None,
            }
        }
        circle.map(|(c, r)| (c.clone(), r.clone()))
    }

    pub fn transformed(&self, m: &RigidMotion) -> Result<Self, BodyError> {
        Self::new(self.elements.iter().map(|e| e.transformed(m)).collect(), self.precision.clone())
    }

    /// Polygon scaled by `k > 0` about `about`. Arcs are not supported.
    pub fn scaled_polygon(&self, k: &Scalar, about: &Point) -> Option<Result<Self, BodyError>> {
        if !self.is_polygon() {
            return None;
        }
        let vs: Vec<Point> =
            self.starts.iter().map(|v| about + &(v - about).scale(k)).collect();
        Some(Self::polygon_with(&vs, self.precision.clone()))
    }

    /// Axis-aligned bounding box of the element endpoints and arc extremes,
    /// as `(min, max)` in floating point.
    pub fn bbox_f64(&self) -> ((f64, f64), (f64, f64)) {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut push = |(x, y): (f64, f64)| {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        };
        for (i, e) in self.elements.iter().enumerate() {
            push(self.starts[i].to_f64());
            if let BoundaryElement::Arc { center, radius, from, to } = e {
                let (cx, cy) = center.to_f64();
                let r = scalar_to_f64(radius);
                for d in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
                    let d = Direction::from_ints(d.0, d.1).expect("axis");
                    if from.cross(&d) >= Scalar::zero() && d.cross(to) >= Scalar::zero() {
                        let (dx, dy) = d.to_f64();
                        push((cx + r * dx, cy + r * dy));
                    }
                }
            }
        }
        (lo, hi)
    }

    /// Exact bounding box; `None` when arcs are present.
    pub fn bbox_exact(&self) -> Option<(Point, Point)> {
        if !self.is_polygon() {
            return None;
        }
        let xs = self.starts.iter().map(|p| &p.x);
        let ys = self.starts.iter().map(|p| &p.y);
        let min = |it: &mut dyn Iterator<Item = &Scalar>| it.min().cloned();
        let max = |it: &mut dyn Iterator<Item = &Scalar>| it.max().cloned();
        Some((
            Point::new(min(&mut xs.clone())?, min(&mut ys.clone())?),
            Point::new(max(&mut xs.clone())?, max(&mut ys.clone())?),
        ))
    }

    fn points_match(&self, p: &Point, q: &Point) -> bool {
        match self.precision.tau() {
            None => p == q,
            Some(tau) => (p - q).norm2() <= tau * tau,
        }
    }

    /// Twice the signed area enclosed by the chain.
    fn doubled_area(&self) -> Scalar {
        let n = self.elements.len();
        let mut a = Scalar::zero();
        for i in 0..n {
            a += self.starts[i].cross(&self.starts[(i + 1) % n]);
        }
        for e in &self.elements {
            if let BoundaryElement::Arc { radius, from, to, .. } = e {
                let th = sweep_angle(from, to);
                let r = scalar_to_f64(radius);
                a += scalar_from_f64(r * r * (th - th.sin()));
            }
        }
        a
    }

    /// Checks closure, convexity, counterclockwise orientation and nonempty
    /// interior.
    pub fn validate(&self) -> Result<(), BodyError> {
        let n = self.elements.len();
        if n < 2 {
            return Err(BodyError::TooFewElements);
        }
        for (index, e) in self.elements.iter().enumerate() {
            match e {
                BoundaryElement::Segment { a, b } => {
                    if a == b {
                        return Err(BodyError::DegenerateElement { index });
                    }
                }
                BoundaryElement::Arc { radius, from, to, .. } => {
                    if self.precision.is_exact() {
                        return Err(BodyError::ArcsRequireTolerance { index });
                    }
                    if !radius.is_positive() || !from.cross(to).is_positive() {
                        return Err(BodyError::DegenerateElement { index });
                    }
                }
            }
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if !self.points_match(&self.ends[i], &self.starts[j]) {
                return Err(BodyError::NotClosed { index: i });
            }
        }
        // Turning at each junction, from the end of element i into element i+1.
        let mut turns = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let out = self.elements[i].end_tangent().expect("nondegenerate");
            let inn = self.elements[j].start_tangent().expect("nondegenerate");
            let cr = out.cross(&inn);
            let scale = out.vec().norm2() * inn.vec().norm2();
            let turn = match self.precision.sign(&cr, &scale) {
                Ok(o) => o,
                Err(NearDegenerate) => Ordering::Equal,
            };
            let turn = if turn == Ordering::Equal && !out.dot(&inn).is_positive() {
                // Reversal of direction is never a convex corner.
                Ordering::Less
            } else {
                turn
            };
            turns.push((j, turn));
        }
        let area = self.doubled_area();
        let first_right = turns.iter().find(|t| t.1 == Ordering::Less).map(|t| t.0);
        if area.is_negative() {
            return Err(BodyError::NotCcw { index: first_right.unwrap_or(0) });
        }
        if area.is_zero() {
            return Err(BodyError::EmptyInterior { index: 0 });
        }
        if let Some(index) = first_right {
            return Err(BodyError::NotConvex { index });
        }
        // With every step a counterclockwise turn below a half turn, the
        // tangent winds once around iff it crosses angle 0 exactly once.
        let half = |d: &Direction| {
            let y = &d.vec().y;
            u8::from(!(y.is_positive() || (y.is_zero() && d.vec().x.is_positive())))
        };
        let mut wraps = 0;
        for i in 0..n {
            let j = (i + 1) % n;
            let s = self.elements[i].start_tangent().expect("nondegenerate");
            let e = self.elements[i].end_tangent().expect("nondegenerate");
            let next = self.elements[j].start_tangent().expect("nondegenerate");
            for (a, b) in [(&s, &e), (&e, &next)] {
                if half(a) == 1 && half(b) == 0 {
                    wraps += 1;
                }
            }
        }
        if wraps != 1 {
            return Err(BodyError::NotConvex { index: 0 });
        }
        Ok(())
    }

    /// Boundary point at `(element, param)`.
    pub fn point_at(&self, element: usize, param: Scalar) -> Result<BoundaryPoint, BodyError> {
        let e = self.elements.get(element).ok_or(BodyError::InvalidBoundaryPoint { element })?;
        if param.is_negative() || param >= Scalar::one() {
            return Err(BodyError::InvalidBoundaryPoint { element });
        }
        let coords = match e {
            BoundaryElement::Segment { a, b } => a + &(b - a).scale(&param),
            BoundaryElement::Arc { center, radius, from, to } => {
                if param.is_zero() {
                    self.starts[element].clone()
                } else {
                    let th = sweep_angle(from, to) * scalar_to_f64(&param);
                    let (fx, fy) = from.to_f64();
                    let (s, c) = th.sin_cos();
                    let d = Direction::new(Point::from_f64(c * fx - s * fy, s * fx + c * fy))
                        .expect("nonzero");
                    point_on_circle(center, radius, &d)
                }
            }
        };
        Ok(BoundaryPoint { element, param, coords })
    }

    pub fn check_point(&self, bp: &BoundaryPoint) -> Result<(), BodyError> {
        let invalid = BodyError::InvalidBoundaryPoint { element: bp.element };
        let e = self.elements.get(bp.element).ok_or(invalid.clone())?;
        if bp.param.is_negative() || bp.param >= Scalar::one() {
            return Err(invalid);
        }
        match e {
            BoundaryElement::Segment { a, b } if self.precision.is_exact() => {
                if bp.coords != a + &(b - a).scale(&bp.param) {
                    return Err(invalid);
                }
            }
            _ => {
                let expected = self.point_at(bp.element, bp.param.clone())?;
                let slack = self.precision.tau().cloned().unwrap_or_else(Scalar::zero) * int(1000);
                if (&expected.coords - &bp.coords).norm2() > &slack * &slack {
                    return Err(invalid);
                }
            }
        }
        Ok(())
    }

    /// One-sided tangents at a boundary point, oriented with the boundary.
    pub fn tangents_at(&self, bp: &BoundaryPoint) -> Result<TangentData, BodyError> {
        self.check_point(bp)?;
        let invalid = BodyError::InvalidBoundaryPoint { element: bp.element };
        let e = &self.elements[bp.element];
        let here = match e {
            BoundaryElement::Segment { .. } => e.start_tangent(),
            BoundaryElement::Arc { center, .. } => {
                if bp.param.is_zero() {
                    e.start_tangent()
                } else {
                    Direction::new(&bp.coords - center).map(|d| d.rot90())
                }
            }
        }
        .ok_or(invalid.clone())?;
        if bp.param.is_zero() {
            let prev = (bp.element + self.len() - 1) % self.len();
            let arriving = self.elements[prev].end_tangent().ok_or(invalid)?;
            Ok(TangentData { u_left: arriving, u_right: here })
        } else {
            Ok(TangentData { u_left: here.clone(), u_right: here })
        }
    }

    /// Interior/boundary/exterior classification of `p`.
    pub fn contains(&self, p: &Point) -> Result<Location, NearDegenerate> {
        let mut on_boundary = false;
        let mut near = false;
        for e in &self.elements {
            let sign = match e {
                BoundaryElement::Segment { a, b } => {
                    let d = b - a;
                    self.precision.sign(&d.cross(&(p - a)), &d.norm2())
                }
                BoundaryElement::Arc { center, radius, from, to } => {
                    self.precision.sign_f64(arc_margin(center, radius, from, to, p))
                }
            };
            match sign {
                Ok(Ordering::Less) => return Ok(Location::Exterior),
                Ok(Ordering::Equal) => on_boundary = true,
                Ok(Ordering::Greater) => {}
                Err(NearDegenerate) => near = true,
            }
        }
        if near {
            Err(NearDegenerate)
        } else if on_boundary {
            Ok(Location::Boundary)
        } else {
            Ok(Location::Interior)
        }
    }

    /// Finds the canonical boundary address of `p`. Exact bodies need `p`
    /// exactly on the boundary; tolerant bodies accept distance up to `tau`.
    pub fn locate(&self, p: &Point) -> Result<BoundaryPoint, BodyError> {
        for i in 0..self.len() {
            if self.points_match(p, &self.starts[i]) {
                let coords = if self.is_exact() { self.starts[i].clone() } else { p.clone() };
                return Ok(BoundaryPoint { element: i, param: Scalar::zero(), coords });
            }
        }
        for (i, e) in self.elements.iter().enumerate() {
            if let Some(param) = self.param_on(e, p) {
                if param.is_positive() && param < Scalar::one() {
                    return Ok(BoundaryPoint { element: i, param, coords: p.clone() });
                }
            }
        }
        Err(BodyError::NotOnBoundary(p.clone()))
    }

    fn param_on(&self, e: &BoundaryElement, p: &Point) -> Option<Scalar> {
        match e {
            BoundaryElement::Segment { a, b } => {
                let d = b - a;
                let len2 = d.norm2();
                let t = d.dot(&(p - a)) / &len2;
                let on_line = match self.precision.sign(&d.cross(&(p - a)), &len2) {
                    Ok(o) => o == Ordering::Equal,
                    Err(NearDegenerate) => true,
                };
                (on_line && !t.is_negative() && t <= Scalar::one()).then_some(t)
            }
            BoundaryElement::Arc { center, radius, from, to } => {
                let tau = scalar_to_f64(self.precision.tau()?);
                let v = Direction::new(p - center)?;
                let (vx, vy) = v.to_f64();
                if (vx.hypot(vy) - scalar_to_f64(radius)).abs() > tau {
                    return None;
                }
                if from.cross(&v).is_negative() || v.cross(to).is_negative() {
                    return None;
                }
                let t = sweep_angle(from, &v) / sweep_angle(from, to);
                Some(scalar_from_f64(t.clamp(0.0, 1.0)))
            }
        }
    }

    /// Arc length of element `i`: exact for segments of rational length,
    /// otherwise the exact value of a floating-point approximation. Either
    /// way it is a fixed rational, so walking forth and back cancels.
    pub fn element_length(&self, i: usize) -> Scalar {
        match &self.elements[i] {
            BoundaryElement::Segment { a, b } => {
                let l2 = (b - a).norm2();
                exact_sqrt(&l2).unwrap_or_else(|| scalar_from_f64(scalar_to_f64(&l2).sqrt()))
            }
            BoundaryElement::Arc { radius, from, to, .. } => {
                scalar_from_f64(scalar_to_f64(radius) * sweep_angle(from, to))
            }
        }
    }

    pub fn perimeter(&self) -> Scalar {
        (0..self.len()).map(|i| self.element_length(i)).sum()
    }

    /// Walks `s` along the boundary (positive is counterclockwise).
    pub fn offset_along_boundary(&self, bp: &BoundaryPoint, s: &Scalar) -> Result<BoundaryPoint, BodyError> {
        self.check_point(bp)?;
        let n = self.len();
        let per = self.perimeter();
        // Reduce into [0, perimeter) then walk forward, or walk backward when
        // that is shorter; both are exact on the parameter.
        let mut rem = s.clone();
        let laps = (&rem / &per).floor();
        rem -= &laps * &per;
        let forward = rem <= &per - &rem;
        let (mut i, mut param) = (bp.element, bp.param.clone());
        if forward {
            loop {
                let len = self.element_length(i);
                let left = (Scalar::one() - &param) * &len;
                if rem < left {
                    param += &rem / &len;
                    break;
                }
                rem -= left;
                i = (i + 1) % n;
                param = Scalar::zero();
                if rem.is_zero() {
                    break;
                }
            }
        } else {
            rem = &per - &rem;
            loop {
                let len = self.element_length(i);
                let behind = &param * &len;
                if rem <= behind {
                    param -= &rem / &len;
                    break;
                }
                rem -= behind;
                i = (i + n - 1) % n;
                param = Scalar::one();
            }
        }
        self.point_at(i, param)
    }
}

/// Signed distance-like margin of `p` inside the region cut out by the
/// supporting lines of an arc: positive inside.
fn arc_margin(center: &Point, radius: &Scalar, from: &Direction, to: &Direction, p: &Point) -> f64 {
    let r = scalar_to_f64(radius);
    let (vx, vy) = (p - center).to_f64();
    let unit = |d: &Direction| {
        let (x, y) = d.to_f64();
        let n = x.hypot(y);
        (x / n, y / n)
    };
    let v = p - center;
    let inside_wedge = !v.is_zero()
        && from.vec().cross(&v) >= Scalar::zero()
        && v.cross(to.vec()) >= Scalar::zero();
    let reach = if inside_wedge {
        vx.hypot(vy)
    } else {
        let (fx, fy) = unit(from);
        let (tx, ty) = unit(to);
        (vx * fx + vy * fy).max(vx * tx + vy * ty)
    };
    r - reach
}
