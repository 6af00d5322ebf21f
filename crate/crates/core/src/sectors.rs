//! Normal lines, normal sectors and their sets of directions.
//!
//! At a boundary point `a` with one-sided tangents `u_left`, `u_right` the
//! inward normals are the quarter turns of the tangents. The large sectors
//! `L(a)`, `R(a)` are unions of the left (right) sides of both normals, and the
//! small sectors `l(a)`, `r(a)` are the intersections. All of them are stored
//! symbolically as two lines through the apex.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::geom::{
    Closure, Direction, HalfPlane, HalfSide, NearDegenerate, OrientedLine, Point, Precision, Rotor, Side,
};

/// One-sided tangent directions at a boundary point, both oriented along the
/// counterclockwise boundary. `u_left` comes from the arriving side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TangentData {
    pub u_left: Direction,
    pub u_right: Direction,
}

impl TangentData {
    pub fn smooth(u: Direction) -> Self {
        TangentData { u_left: u.clone(), u_right: u }
    }

    pub fn is_smooth(&self) -> bool {
        self.u_left.same_ray(&self.u_right)
    }
}

/// Left and right inward normals through `apex`.
pub fn normals_at(apex: &Point, t: &TangentData) -> (OrientedLine, OrientedLine) {
    (
        OrientedLine::new(apex.clone(), t.u_left.rot90()),
        OrientedLine::new(apex.clone(), t.u_right.rot90()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorKind {
    /// `L(a)`: union of the left sides of both normals.
    L,
    /// `R(a)`: union of the right sides.
    R,
    /// `l(a)`: intersection of the left sides.
    SmallL,
    /// `r(a)`: intersection of the right sides.
    SmallR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Combinator {
    Union,
    Intersection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    In,
    OnBoundary,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sector {
    pub apex: Point,
    pub n_left: OrientedLine,
    pub n_right: OrientedLine,
    pub combinator: Combinator,
    pub sides: HalfSide,
    pub closure: Closure,
}

impl Sector {
    pub fn new(kind: SectorKind, closure: Closure, apex: &Point, t: &TangentData) -> Sector {
        let (n_left, n_right) = normals_at(apex, t);
        let (combinator, sides) = match kind {
            SectorKind::L => (Combinator::Union, HalfSide::Left),
            SectorKind::R => (Combinator::Union, HalfSide::Right),
            SectorKind::SmallL => (Combinator::Intersection, HalfSide::Left),
            SectorKind::SmallR => (Combinator::Intersection, HalfSide::Right),
        };
        Sector { apex: apex.clone(), n_left, n_right, combinator, sides, closure }
    }

    /// Whether both normals coincide, in which case the sector is one half-plane.
    pub fn is_half_plane(&self) -> bool {
        self.n_left.dir.same_ray(&self.n_right.dir)
    }

    /// Bounding half-planes; one when the normals coincide.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        let hp = |l: &OrientedLine| HalfPlane::new(l.clone(), self.sides, self.closure);
        if self.is_half_plane() {
            vec![hp(&self.n_left)]
        } else {
            vec![hp(&self.n_left), hp(&self.n_right)]
        }
    }

    fn oriented(&self, s: Side) -> Ordering {
        let s = match self.sides {
            HalfSide::Left => s,
            HalfSide::Right => s.flipped(),
        };
        match s {
            Side::Left => Ordering::Greater,
            Side::On => Ordering::Equal,
            Side::Right => Ordering::Less,
        }
    }

    pub fn contains(&self, p: &Point) -> Membership {
        self.contains_with(p, &Precision::Exact).expect("exact predicates never fail")
    }

    /// Membership with `ON_BOUNDARY` reported only for closed sectors.
    pub fn contains_with(&self, p: &Point, precision: &Precision) -> Result<Membership, NearDegenerate> {
        let s1 = self.oriented(self.n_left.side_of_with(p, precision)?);
        let s2 = self.oriented(self.n_right.side_of_with(p, precision)?);
        let m = match self.combinator {
            Combinator::Union => std::cmp::max(s1, s2),
            Combinator::Intersection => std::cmp::min(s1, s2),
        };
        Ok(match (m, self.closure) {
            (Ordering::Greater, _) => Membership::In,
            (Ordering::Equal, Closure::Closed) => Membership::OnBoundary,
            _ => Membership::Out,
        })
    }
}

/// Closed counterclockwise arc of directions from `start` to `end`. When both
/// are the same ray the arc is that single direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CircleArc {
    pub start: Direction,
    pub end: Direction,
}

/// 0 when `d` is at counterclockwise angle `[0, pi)` from `base`, else 1.
fn rel_half(base: &Direction, d: &Direction) -> u8 {
    let c = base.cross(d);
    u8::from(!(c.is_positive() || (c.is_zero() && base.dot(d).is_positive())))
}

/// Compares the counterclockwise angles from `base` to `a` and to `b`.
fn ccw_cmp(base: &Direction, a: &Direction, b: &Direction) -> Ordering {
    rel_half(base, a).cmp(&rel_half(base, b)).then_with(|| {
        let c = a.cross(b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

impl CircleArc {
    pub fn new(start: Direction, end: Direction) -> Self {
        CircleArc { start, end }
    }

    /// Directions `d` with `cross(n, d) >= 0`.
    pub fn semicircle(n: &Direction) -> Self {
        CircleArc::new(n.clone(), n.reversed())
    }

    pub fn contains(&self, d: &Direction) -> bool {
        if self.start.same_ray(&self.end) {
            return d.same_ray(&self.start);
        }
        ccw_cmp(&self.start, d, &self.end) != Ordering::Greater
    }
}

/// Closed subset of the circle of directions: a finite union of disjoint
/// closed arcs, or the whole circle. Arcs are kept sorted by the angle of
/// their start from `(1, 0)`, so equal sets have equal representations up to
/// positive scaling of the endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectionSet {
    full: bool,
    arcs: Vec<CircleArc>,
}

/// A direction strictly inside the counterclockwise gap from `a` to `b`.
fn gap_direction(a: &Direction, b: &Direction) -> Direction {
    if a.same_ray(b) {
        return a.reversed();
    }
    let c = a.cross(b);
    let sum = a.vec() + b.vec();
    if c.is_positive() {
        Direction::new(sum).expect("non-opposite")
    } else if c.is_negative() {
        Direction::new(-&sum).expect("non-opposite")
    } else {
        a.rot90()
    }
}

impl DirectionSet {
    pub fn empty() -> Self {
        DirectionSet { full: false, arcs: Vec::new() }
    }

    pub fn full() -> Self {
        DirectionSet { full: true, arcs: Vec::new() }
    }

    pub fn from_arc(arc: CircleArc) -> Self {
        Self::from_predicate(vec![arc.start.clone(), arc.end.clone()], |d| arc.contains(d))
    }

    pub fn is_empty(&self) -> bool {
        !self.full && self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn arcs(&self) -> &[CircleArc] {
        &self.arcs
    }

    pub fn contains(&self, d: &Direction) -> bool {
        self.full || self.arcs.iter().any(|a| a.contains(d))
    }

    fn endpoints(&self) -> impl Iterator<Item = &Direction> {
        self.arcs.iter().flat_map(|a| [&a.start, &a.end])
    }

    pub fn intersection(&self, other: &DirectionSet) -> DirectionSet {
        let pts = self.endpoints().chain(other.endpoints()).cloned().collect();
        Self::from_predicate(pts, |d| self.contains(d) && other.contains(d))
    }

    pub fn union(&self, other: &DirectionSet) -> DirectionSet {
        let pts = self.endpoints().chain(other.endpoints()).cloned().collect();
        Self::from_predicate(pts, |d| self.contains(d) || other.contains(d))
    }

    /// Rebuilds a closed set from its membership predicate, given every
    /// direction where membership can change.
    fn from_predicate(mut pts: Vec<Direction>, pred: impl Fn(&Direction) -> bool) -> DirectionSet {
        pts.sort_by(|a, b| a.angle_cmp(b));
        pts.dedup_by(|a, b| a.same_ray(b));
        let pts: Vec<Direction> = pts.iter().map(Direction::canonical).collect();
        let m = pts.len();
        if m == 0 {
            let probe = Direction::from_ints(1, 0).expect("nonzero");
            return if pred(&probe) { Self::full() } else { Self::empty() };
        }
        // Alternating sequence: endpoint i, then the open gap after it.
        let at: Vec<bool> = pts.iter().map(&pred).collect();
        let gap: Vec<bool> = (0..m).map(|i| pred(&gap_direction(&pts[i], &pts[(i + 1) % m]))).collect();
        if at.iter().all(|&b| b) && gap.iter().all(|&b| b) {
            return Self::full();
        }
        let mut arcs = Vec::new();
        for i in 0..m {
            // A run starts at an included endpoint whose preceding gap is excluded.
            if !at[i] || gap[(i + m - 1) % m] {
                continue;
            }
            let mut j = i;
            while gap[j % m] && j < i + m {
                j += 1;
            }
            arcs.push(CircleArc::new(pts[i].clone(), pts[j % m].clone()));
        }
        arcs.sort_by(|a, b| a.start.angle_cmp(&b.start));
        DirectionSet { full: false, arcs }
    }

    /// Deterministic member: the start of the first arc, or `(1, 0)` for the
    /// full circle.
    pub fn witness(&self) -> Option<Direction> {
        if self.full {
            Direction::from_ints(1, 0)
        } else {
            self.arcs.first().map(|a| a.start.clone())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectionKind {
    /// Directions of the closed large sector `L(a)`.
    VecL,
    /// Directions of the closed small sector `l(a)`.
    VecSmallL,
}

/// Perturbation applied to the bounding normals of a direction set.
#[derive(Debug, Clone)]
pub enum Slack {
    None,
    /// Widen each half circle by the rotor's angle at both ends.
    Loosen(Rotor),
    /// Narrow each half circle by the rotor's angle at both ends.
    Tighten(Rotor),
}

fn half_circle(n: &Direction, slack: &Slack) -> DirectionSet {
    let arc = match slack {
        Slack::None => CircleArc::semicircle(n),
        Slack::Loosen(r) => CircleArc::new(n.rotated(&r.inverse()), n.reversed().rotated(r)),
        Slack::Tighten(r) => CircleArc::new(n.rotated(r), n.reversed().rotated(&r.inverse())),
    };
    DirectionSet::from_arc(arc)
}

/// Set of directions `d` with `apex + d` in the closed sector. The result does
/// not depend on the apex.
pub fn direction_set(kind: DirectionKind, t: &TangentData) -> DirectionSet {
    direction_set_with(kind, t, &Slack::None)
}

pub fn direction_set_with(kind: DirectionKind, t: &TangentData, slack: &Slack) -> DirectionSet {
    let a = half_circle(&t.u_left.rot90(), slack);
    let b = half_circle(&t.u_right.rot90(), slack);
    match kind {
        DirectionKind::VecL => a.union(&b),
        DirectionKind::VecSmallL => a.intersection(&b),
    }
}
