//! Exact feasibility of small systems of strict and non-strict half-planes,
//! of sector systems, and of intersections of direction sets.
//!
//! Planar systems are decided by Fourier–Motzkin elimination of `y` with
//! strictness carried through each combined pair, then back-substitution to
//! an explicit rational witness.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::geom::{int, rational_rotation, Closure, Direction, HalfPlane, HalfSide, Point, Precision, Scalar};
use crate::sectors::{direction_set_with, Combinator, DirectionKind, DirectionSet, Sector, Slack, TangentData};

pub const MAX_CONSTRAINTS: usize = 64;
pub const MAX_UNION_SECTORS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("{count} constraints exceed the limit of {MAX_CONSTRAINTS}")]
    ConstraintLimitExceeded { count: usize },
    #[error("{count} union sectors exceed the limit of {MAX_UNION_SECTORS}")]
    TooManyUnionSectors { count: usize },
    #[error("sector system mixes open and closed sectors")]
    MixedClosure,
}

/// `normal . p > offset` when strict, `normal . p >= offset` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub normal: Direction,
    pub offset: Scalar,
    pub strict: bool,
}

impl LinearConstraint {
    pub fn new(normal: Direction, offset: Scalar, strict: bool) -> Self {
        LinearConstraint { normal, offset, strict }
    }

    pub fn from_half_plane(h: &HalfPlane) -> Self {
        // Left of (base, dir) is cross(dir, p - base) > 0, i.e. rot90(dir) . p > rot90(dir) . base.
        let n = match h.side {
            HalfSide::Left => h.line.dir.rot90(),
            HalfSide::Right => h.line.dir.rot90().reversed(),
        };
        let offset = n.vec().dot(&h.line.base);
        LinearConstraint::new(n, offset, h.closure == Closure::Open)
    }

    pub fn value(&self, p: &Point) -> Scalar {
        self.normal.vec().dot(p) - &self.offset
    }

    pub fn satisfied_by(&self, p: &Point) -> bool {
        let v = self.value(p);
        if self.strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    }

    /// Moves the boundary outward by at least `amount` in Euclidean distance
    /// (inward for negative `amount`) and sets the strictness.
    pub fn shifted(&self, amount: &Scalar, strict: bool) -> Self {
        let n = self.normal.vec();
        let l1 = n.x.abs() + n.y.abs();
        LinearConstraint::new(self.normal.clone(), &self.offset - amount * l1, strict)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Witness {
    Point(Point),
    Direction(Direction),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeasibilityResult {
    Empty,
    Nonempty(Witness),
    /// The answer flips within the tolerance band; no certificate either way.
    NearDegenerate,
}

impl FeasibilityResult {
    pub fn is_empty(&self) -> bool {
        matches!(self, FeasibilityResult::Empty)
    }

    pub fn is_nonempty(&self) -> bool {
        matches!(self, FeasibilityResult::Nonempty(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            FeasibilityResult::Nonempty(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Bound {
    value: Scalar,
    strict: bool,
}

/// Tightest of `bounds`; `lower` selects max, else min. Strict wins ties.
fn tightest(bounds: impl Iterator<Item = Bound>, lower: bool) -> Option<Bound> {
    bounds.fold(None, |acc: Option<Bound>, b| match acc {
        None => Some(b),
        Some(a) => {
            let better = if lower { b.value > a.value } else { b.value < a.value };
            if better || (b.value == a.value && b.strict && !a.strict) {
                Some(b)
            } else {
                Some(a)
            }
        }
    })
}

/// A value in the interval, preferring the midpoint; unbounded sides step one
/// unit past the finite endpoint.
fn pick(lo: Option<Bound>, hi: Option<Bound>) -> Option<Scalar> {
    match (lo, hi) {
        (None, None) => Some(Scalar::zero()),
        (Some(l), None) => Some(l.value + Scalar::one()),
        (None, Some(h)) => Some(h.value - Scalar::one()),
        (Some(l), Some(h)) => {
            if l.value < h.value {
                Some((l.value + h.value) / int(2))
            } else if l.value == h.value && !l.strict && !h.strict {
                Some(l.value)
            } else {
                None
            }
        }
    }
}

/// Fourier–Motzkin on the system; returns a satisfying point or `None`.
fn solve(cs: &[LinearConstraint]) -> Option<Point> {
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    // x-constraints as (alpha, beta, strict): alpha x > beta (or >=).
    let mut xs: Vec<(Scalar, Scalar, bool)> = Vec::new();
    for c in cs {
        let n = c.normal.vec();
        if n.y.is_zero() {
            xs.push((n.x.clone(), c.offset.clone(), c.strict));
        } else if n.y.is_positive() {
            lowers.push(c);
        } else {
            uppers.push(c);
        }
    }
    // y >= (c - a x) / b for b > 0; y <= (c - a x) / b for b < 0.
    for l in &lowers {
        for u in &uppers {
            let (nl, nu) = (l.normal.vec(), u.normal.vec());
            let alpha = &nl.x / &nl.y - &nu.x / &nu.y;
            let beta = &l.offset / &nl.y - &u.offset / &nu.y;
            xs.push((alpha, beta, l.strict || u.strict));
        }
    }
    let mut xlo = Vec::new();
    let mut xhi = Vec::new();
    for (alpha, beta, strict) in xs {
        if alpha.is_zero() {
            let ok = if strict { beta.is_negative() } else { !beta.is_positive() };
            if !ok {
                return None;
            }
        } else {
            let b = Bound { value: &beta / &alpha, strict };
            if alpha.is_positive() {
                xlo.push(b);
            } else {
                xhi.push(b);
            }
        }
    }
    let x = pick(tightest(xlo.into_iter(), true), tightest(xhi.into_iter(), false))?;
    let at = |c: &LinearConstraint| {
        let n = c.normal.vec();
        Bound { value: (&c.offset - &n.x * &x) / &n.y, strict: c.strict }
    };
    let y = pick(
        tightest(lowers.iter().map(|c| at(c)), true),
        tightest(uppers.iter().map(|c| at(c)), false),
    )?;
    let p = Point::new(x, y);
    debug_assert!(cs.iter().all(|c| c.satisfied_by(&p)));
    Some(p)
}

/// Decides whether the mixed strict/non-strict system has a solution in the
/// plane, returning an exact witness when it does.
pub fn linear_feasible(cs: &[LinearConstraint]) -> Result<FeasibilityResult, FeasibilityError> {
    if cs.len() > MAX_CONSTRAINTS {
        return Err(FeasibilityError::ConstraintLimitExceeded { count: cs.len() });
    }
    Ok(match solve(cs) {
        Some(p) => FeasibilityResult::Nonempty(Witness::Point(p)),
        None => FeasibilityResult::Empty,
    })
}

/// Per-sector alternatives: a union contributes one choice per normal.
fn alternatives(s: &Sector) -> Vec<Vec<LinearConstraint>> {
    let cs: Vec<LinearConstraint> = s.half_planes().iter().map(LinearConstraint::from_half_plane).collect();
    match s.combinator {
        Combinator::Intersection => vec![cs],
        Combinator::Union => cs.into_iter().map(|c| vec![c]).collect(),
    }
}

fn enumerate_systems(
    alts: &[Vec<Vec<LinearConstraint>>],
    adjust: impl Fn(&LinearConstraint) -> LinearConstraint + Sync,
) -> Option<Point> {
    // Choice bits: the first branching sector is the most significant, so the
    // index order is lexicographic over per-sector choices.
    let branching: Vec<usize> = (0..alts.len()).filter(|&i| alts[i].len() > 1).collect();
    let total = 1usize << branching.len();
    (0..total).into_par_iter().find_map_first(|k| {
        let mut system = Vec::new();
        for (i, a) in alts.iter().enumerate() {
            let choice = match branching.iter().position(|&b| b == i) {
                Some(pos) => (k >> (branching.len() - 1 - pos)) & 1,
                None => 0,
            };
            system.extend(a[choice].iter().map(&adjust));
        }
        solve(&system)
    })
}

/// Emptiness of the intersection of the given sectors. Unions are distributed
/// into at most `2^16` intersection systems, enumerated in lexicographic order
/// of the per-sector choice (left normal before right normal).
///
/// With a tolerance, `Empty` is reported only if the system stays empty after
/// moving every boundary outward by `tau`, and `Nonempty` only if it stays
/// nonempty after moving them inward; otherwise `NearDegenerate`.
pub fn sector_system_empty(sectors: &[Sector], precision: &Precision) -> Result<FeasibilityResult, FeasibilityError> {
    if let Some(first) = sectors.first() {
        if sectors.iter().any(|s| s.closure != first.closure) {
            return Err(FeasibilityError::MixedClosure);
        }
    }
    let alts: Vec<_> = sectors.iter().map(alternatives).collect();
    let unions = alts.iter().filter(|a| a.len() > 1).count();
    if unions > MAX_UNION_SECTORS {
        return Err(FeasibilityError::TooManyUnionSectors { count: unions });
    }
    let width: usize = alts.iter().map(|a| a.iter().map(Vec::len).max().unwrap_or(0)).sum();
    if width > MAX_CONSTRAINTS {
        return Err(FeasibilityError::ConstraintLimitExceeded { count: width });
    }
    let nominal = |p: Option<Point>| match p {
        Some(p) => FeasibilityResult::Nonempty(Witness::Point(p)),
        None => FeasibilityResult::Empty,
    };
    Ok(match precision {
        Precision::Exact => nominal(enumerate_systems(&alts, |c| c.clone())),
        Precision::Tolerant { tau } => {
            let loose = enumerate_systems(&alts, |c| c.shifted(tau, false));
            if loose.is_none() {
                FeasibilityResult::Empty
            } else {
                let neg = -tau.clone();
                match enumerate_systems(&alts, |c| c.shifted(&neg, true)) {
                    Some(p) => FeasibilityResult::Nonempty(Witness::Point(p)),
                    None => FeasibilityResult::NearDegenerate,
                }
            }
        }
    })
}

/// Intersection of direction sets, with the first arc start as witness.
pub fn direction_sets_intersect(ds: &[DirectionSet]) -> FeasibilityResult {
    let mut acc = DirectionSet::full();
    for d in ds {
        acc = acc.intersection(d);
        if acc.is_empty() {
            return FeasibilityResult::Empty;
        }
    }
    match acc.witness() {
        Some(w) => FeasibilityResult::Nonempty(Witness::Direction(w)),
        None => FeasibilityResult::Empty,
    }
}

/// Direction test for a set of boundary points given their tangent data. A
/// tolerance widens (narrows) every half circle by about `tau` radians for the
/// emptiness (nonemptiness) certificate.
pub fn direction_system_empty(tangents: &[TangentData], kind: DirectionKind, precision: &Precision) -> FeasibilityResult {
    let build = |slack: &Slack| -> Vec<DirectionSet> {
        tangents.iter().map(|t| direction_set_with(kind, t, slack)).collect()
    };
    match precision {
        Precision::Exact => direction_sets_intersect(&build(&Slack::None)),
        Precision::Tolerant { tau } => {
            // Angle of the rotor is 2 atan(tau / 2), just under tau.
            let rotor = rational_rotation(&(tau / int(2)));
            if direction_sets_intersect(&build(&Slack::Loosen(rotor.clone()))).is_empty() {
                return FeasibilityResult::Empty;
            }
            match direction_sets_intersect(&build(&Slack::Tighten(rotor))) {
                r @ FeasibilityResult::Nonempty(_) => r,
                _ => FeasibilityResult::NearDegenerate,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{pow10_neg, rat};
    use crate::sectors::{direction_set, SectorKind};

    fn c(a: i64, b: i64, off: Scalar, strict: bool) -> LinearConstraint {
        LinearConstraint::new(Direction::from_ints(a, b).unwrap(), off, strict)
    }

    fn d(x: i64, y: i64) -> Direction {
        Direction::from_ints(x, y).unwrap()
    }

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn linear_examples() {
        // x < -1 and x > 0.
        let r = linear_feasible(&[c(-1, 0, int(1), true), c(1, 0, int(0), true)]).unwrap();
        assert_eq!(r, FeasibilityResult::Empty);
        // x <= 0, x >= 0, y >= 0.
        let r = linear_feasible(&[c(-1, 0, int(0), false), c(1, 0, int(0), false), c(0, 1, int(0), false)]).unwrap();
        assert_eq!(r, FeasibilityResult::Nonempty(Witness::Point(p(0, 1))));
        // Closed L-bar system of the rectangle points: x <= -1, x <= 1, x >= 0.
        let r = linear_feasible(&[c(-1, 0, int(1), false), c(-1, 0, int(-1), false), c(1, 0, int(0), false)]).unwrap();
        assert_eq!(r, FeasibilityResult::Empty);
    }

    #[test]
    fn strictness_at_a_single_point() {
        let touching = [c(1, 0, int(0), false), c(-1, 0, int(0), false), c(0, 1, int(0), false), c(0, -1, int(0), false)];
        assert!(linear_feasible(&touching).unwrap().is_nonempty());
        let mut open = touching.to_vec();
        open[0].strict = true;
        assert!(linear_feasible(&open).unwrap().is_empty());
        // Wedge x + y >= 0, x - y >= 0 has apex only; strict x + y > 0 is still open-feasible.
        let wedge = [c(1, 1, int(0), true), c(1, -1, int(0), false), c(-1, 0, int(-5), false)];
        let r = linear_feasible(&wedge).unwrap();
        let Some(Witness::Point(w)) = r.witness() else { panic!() };
        assert!(wedge.iter().all(|k| k.satisfied_by(w)));
    }

    #[test]
    fn constraint_limit() {
        let many = vec![c(1, 0, int(0), false); MAX_CONSTRAINTS + 1];
        assert!(matches!(linear_feasible(&many), Err(FeasibilityError::ConstraintLimitExceeded { .. })));
    }

    fn corner_tangents(v: Point, arriving: Direction, departing: Direction) -> (Point, TangentData) {
        (v, TangentData { u_left: arriving, u_right: departing })
    }

    #[test]
    fn sector_system_examples() {
        let smooth = |x: i64, y: i64, ux: i64, uy: i64| (p(x, y), TangentData::smooth(d(ux, uy)));
        let remark = [smooth(-1, 0, 1, 0), smooth(1, 0, 1, 0), smooth(0, 1, -1, 0)];
        let open_l: Vec<Sector> =
            remark.iter().map(|(a, t)| Sector::new(SectorKind::L, Closure::Open, a, t)).collect();
        assert_eq!(sector_system_empty(&open_l, &Precision::Exact).unwrap(), FeasibilityResult::Empty);

        let corners = [
            corner_tangents(p(1, 1), d(0, 1), d(-1, 0)),
            corner_tangents(p(-1, -1), d(0, -1), d(1, 0)),
        ];
        let open_l: Vec<Sector> =
            corners.iter().map(|(a, t)| Sector::new(SectorKind::L, Closure::Open, a, t)).collect();
        assert_eq!(
            sector_system_empty(&open_l, &Precision::Exact).unwrap(),
            FeasibilityResult::Nonempty(Witness::Point(p(0, 0)))
        );

        let mids = [smooth(0, -1, 1, 0), smooth(0, 1, -1, 0)];
        let closed_small: Vec<Sector> =
            mids.iter().map(|(a, t)| Sector::new(SectorKind::SmallL, Closure::Closed, a, t)).collect();
        let r = sector_system_empty(&closed_small, &Precision::Exact).unwrap();
        let Some(Witness::Point(w)) = r.witness() else { panic!("{r:?}") };
        assert_eq!(w.x, int(0));
    }

    #[test]
    fn mixed_closure_is_rejected() {
        let t = TangentData::smooth(d(1, 0));
        let s = [
            Sector::new(SectorKind::L, Closure::Open, &p(0, 0), &t),
            Sector::new(SectorKind::L, Closure::Closed, &p(0, 0), &t),
        ];
        assert_eq!(sector_system_empty(&s, &Precision::Exact), Err(FeasibilityError::MixedClosure));
    }

    #[test]
    fn union_cap() {
        let t = TangentData { u_left: d(0, 1), u_right: d(-1, 0) };
        let s: Vec<Sector> = (0..17).map(|i| Sector::new(SectorKind::L, Closure::Open, &p(i, i), &t)).collect();
        assert!(matches!(
            sector_system_empty(&s, &Precision::Exact),
            Err(FeasibilityError::TooManyUnionSectors { count: 17 })
        ));
    }

    #[test]
    fn tolerant_single_point_is_near_degenerate() {
        let mids = [(p(0, -1), d(1, 0)), (p(0, 1), d(-1, 0)), (p(1, 0), d(0, 1)), (p(-1, 0), d(0, -1))];
        let s: Vec<Sector> = mids
            .iter()
            .map(|(a, u)| Sector::new(SectorKind::L, Closure::Closed, a, &TangentData::smooth(u.clone())))
            .collect();
        assert!(sector_system_empty(&s, &Precision::Exact).unwrap().is_nonempty());
        let tol = Precision::Tolerant { tau: pow10_neg(9) };
        assert_eq!(sector_system_empty(&s, &tol).unwrap(), FeasibilityResult::NearDegenerate);
        // A wide gap is still certified empty.
        let far = [c(1, 0, int(1), false), c(-1, 0, int(1), false)];
        let s2: Vec<_> = far.to_vec();
        assert!(linear_feasible(&s2).unwrap().is_empty());
        assert_eq!(rat(1, 2) + rat(1, 2), int(1));
    }

    #[test]
    fn direction_examples() {
        let sets = [
            direction_set(DirectionKind::VecL, &TangentData::smooth(d(1, 0))),
            direction_set(DirectionKind::VecL, &TangentData::smooth(d(1, 0))),
            direction_set(DirectionKind::VecL, &TangentData::smooth(d(-1, 0))),
        ];
        let r = direction_sets_intersect(&sets);
        let Some(Witness::Direction(w)) = r.witness() else { panic!("{r:?}") };
        assert!(w.same_ray(&d(0, 1)));

        // Straddle points of the square: half circles d_y <= 0, d_x >= 0, d_y >= 0, d_x <= 0.
        let straddle = [d(0, 1), d(-1, 0), d(0, -1), d(1, 0)].map(|u| TangentData::smooth(u));
        let sets: Vec<_> = straddle.iter().map(|t| direction_set(DirectionKind::VecL, t)).collect();
        assert!(direction_sets_intersect(&sets).is_empty());
        assert!(direction_sets_intersect(&[DirectionSet::full()]).is_nonempty());
    }

    #[test]
    fn tolerant_direction_test() {
        let tol = Precision::tolerant_default();
        let remark = [d(1, 0), d(1, 0), d(-1, 0)].map(TangentData::smooth);
        assert_eq!(direction_system_empty(&remark, DirectionKind::VecL, &tol), FeasibilityResult::NearDegenerate);
        let straddle = [d(0, 1), d(-1, 0), d(0, -1), d(1, 0)].map(TangentData::smooth);
        assert!(direction_system_empty(&straddle, DirectionKind::VecL, &tol).is_empty());
        let wide = [d(1, 0), d(-1, 1)].map(TangentData::smooth);
        assert!(direction_system_empty(&wide, DirectionKind::VecL, &tol).is_nonempty());
    }
}
