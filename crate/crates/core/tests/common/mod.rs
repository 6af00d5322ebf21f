//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use immobilize2d::body::{BoundaryPoint, ConvexBody};
use immobilize2d::feasibility::LinearConstraint;
use immobilize2d::fixtures::random_convex_polygon;
use immobilize2d::geom::{int, Direction, Point, Scalar};
use immobilize2d::sectors::{DirectionKind, Membership, Sector, SectorKind, TangentData};
use immobilize2d::geom::Closure;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `a x + b y > c` (strict) or `>= c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Half {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub strict: bool,
}

pub fn random_system(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Half> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| loop {
            let (a, b) = (rng.gen_range(-5..=5), rng.gen_range(-5..=5));
            if (a, b) != (0, 0) {
                break Half { a, b, c: rng.gen_range(-5..=5), strict: rng.gen() };
            }
        })
        .collect()
}

pub fn to_constraints(sys: &[Half]) -> Vec<LinearConstraint> {
    sys.iter()
        .map(|h| LinearConstraint::new(Direction::from_ints(h.a, h.b).unwrap(), int(h.c), h.strict))
        .collect()
}

/// Homogeneous point `(x / w, y / w)` with `w > 0`.
#[derive(Debug, Clone, Copy)]
struct Hom {
    x: i128,
    y: i128,
    w: i128,
}

fn first_order(h: &Half, p: &Hom) -> i128 {
    h.a as i128 * p.x + h.b as i128 * p.y - h.c as i128 * p.w
}

fn lex_ok(h: &Half, p: &Hom, d: (i128, i128)) -> bool {
    let f = first_order(h, p).signum();
    let s = (h.a as i128 * d.0 + h.b as i128 * d.1).signum();
    match (f, s) {
        (1, _) => true,
        (0, 1) => true,
        (0, 0) => !h.strict,
        _ => false,
    }
}

/// Vertex enumeration: the system is feasible iff some `P + eps D` satisfies
/// every constraint for all small `eps > 0`, where `P` ranges over the
/// arrangement vertices, the feet of the lines and the origin, and `D` over
/// the normals and line directions through `P` and their pairwise sums.
pub fn brute_force_feasible(sys: &[Half]) -> bool {
    let mut candidates = vec![Hom { x: 0, y: 0, w: 1 }];
    for (i, p) in sys.iter().enumerate() {
        let n2 = (p.a * p.a + p.b * p.b) as i128;
        candidates.push(Hom { x: (p.c * p.a) as i128, y: (p.c * p.b) as i128, w: n2 });
        for q in &sys[i + 1..] {
            let det = (p.a * q.b - q.a * p.b) as i128;
            if det == 0 {
                continue;
            }
            let x = (p.c * q.b - q.c * p.b) as i128;
            let y = (p.a * q.c - q.a * p.c) as i128;
            let s = det.signum();
            candidates.push(Hom { x: x * s, y: y * s, w: det * s });
        }
    }
    candidates.iter().any(|pt| {
        let mut dirs: Vec<(i128, i128)> = Vec::new();
        for h in sys.iter().filter(|h| first_order(h, pt) == 0) {
            let (a, b) = (h.a as i128, h.b as i128);
            dirs.extend([(a, b), (-a, -b), (-b, a), (b, -a)]);
        }
        let mut all = vec![(0, 0)];
        all.extend(dirs.iter().copied());
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                all.push((dirs[i].0 + dirs[j].0, dirs[i].1 + dirs[j].1));
            }
        }
        all.iter().any(|&d| sys.iter().all(|h| lex_ok(h, pt, d)))
    })
}

/// Direction-set intersection decided through sector membership of
/// `origin + d` for every boundary direction of every half circle.
pub fn directions_intersect_via_sectors(tangents: &[TangentData], kind: DirectionKind) -> bool {
    let sector_kind = match kind {
        DirectionKind::VecL => SectorKind::L,
        DirectionKind::VecSmallL => SectorKind::SmallL,
    };
    let o = Point::origin();
    let sectors: Vec<Sector> = tangents.iter().map(|t| Sector::new(sector_kind, Closure::Closed, &o, t)).collect();
    let mut cands: Vec<Direction> = Vec::new();
    for t in tangents {
        for u in [&t.u_left, &t.u_right] {
            cands.push(u.rot90());
            cands.push(u.rot270());
        }
    }
    if cands.is_empty() {
        return true;
    }
    cands
        .iter()
        .any(|d| sectors.iter().all(|s| s.contains(d.vec()) != Membership::Out))
}

pub fn random_polygon(rng: &mut ChaCha8Rng) -> ConvexBody {
    let k = rng.gen_range(4..=10);
    random_convex_polygon(rng.gen(), k).expect("random polygon")
}

/// A vertex with probability 1/3, otherwise a point at parameter `j / 16`.
pub fn random_boundary_point(rng: &mut ChaCha8Rng, body: &ConvexBody) -> BoundaryPoint {
    let e = rng.gen_range(0..body.len());
    let param = if rng.gen_range(0..3) == 0 { int(0) } else { Scalar::new(rng.gen_range(1..16i64).into(), 16.into()) };
    body.point_at(e, param).unwrap()
}

/// Uniform rational point in `[x0, x1] x [y0, y1]` on a `2^-20` lattice.
pub fn random_probe(rng: &mut ChaCha8Rng, lo: &Point, hi: &Point) -> Point {
    let den = 1i64 << 20;
    let mut coord = |a: &Scalar, b: &Scalar| {
        let t = Scalar::new(rng.gen_range(0..=den).into(), den.into());
        a + (b - a) * t
    };
    let x = coord(&lo.x, &hi.x);
    let y = coord(&lo.y, &hi.y);
    Point::new(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(a: i64, b: i64, c: i64, strict: bool) -> Half {
        Half { a, b, c, strict }
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_feasible(&[]));
        assert!(brute_force_feasible(&[h(1, 0, 0, false), h(-1, 0, 0, false)]));
        assert!(!brute_force_feasible(&[h(1, 0, 0, true), h(-1, 0, 0, false)]));
        assert!(brute_force_feasible(&[h(1, 0, 0, true), h(-1, 0, -1, true)]));
        assert!(!brute_force_feasible(&[h(1, 0, 1, false), h(-1, 0, 0, false)]));
        assert!(brute_force_feasible(&[h(1, 0, 0, false), h(0, 1, 0, false), h(-1, -1, 0, false)]));
        assert!(!brute_force_feasible(&[h(1, 0, 0, false), h(0, 1, 0, false), h(-1, -1, 0, true)]));
        assert!(brute_force_feasible(&[h(1, 0, 0, true), h(0, 1, 0, true), h(-1, -1, -3, true)]));
    }
}
