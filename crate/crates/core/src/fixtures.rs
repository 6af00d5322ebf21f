//! Named bodies and point sets, truncated constructions with accumulating
//! contact sets, and seeded random convex polygons.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::body::{BodyError, BoundaryElement, BoundaryPoint, ConvexBody};
use crate::classify::{Question, Status, Verdict};
use crate::feasibility::FeasibilityResult;
use crate::geom::{int, rat, Direction, Point, Precision, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("parameter {value} outside {min}..={max}")]
    OutOfRange { value: i64, min: i64, max: i64 },
    #[error("could not build a nondegenerate polygon")]
    Degenerate,
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error("unknown fixture {0:?}")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Empty,
    Nonempty,
    NearDegenerate,
}

impl Outcome {
    pub fn of(r: &FeasibilityResult) -> Self {
        match r {
            FeasibilityResult::Empty => Outcome::Empty,
            FeasibilityResult::Nonempty(_) => Outcome::Nonempty,
            FeasibilityResult::NearDegenerate => Outcome::NearDegenerate,
        }
    }
}

/// Expected parts of a verdict. Test outcomes are in the order open left,
/// open right, closed left, closed right, directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub question: Question,
    pub status: Status,
    pub tests: [Option<Outcome>; 5],
}

impl Expected {
    pub fn matches(&self, v: &Verdict) -> bool {
        let t = &v.tests;
        let got = [&t.open_left, &t.open_right, &t.closed_left, &t.closed_right, &t.directions].map(Outcome::of);
        v.question == self.question
            && v.status == self.status
            && self.tests.iter().zip(got).all(|(e, g)| e.map_or(true, |e| e == g))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub body: ConvexBody,
    pub points: Vec<BoundaryPoint>,
    pub expected: Vec<Expected>,
    /// Finite stand-in for a construction with infinitely many contacts.
    pub truncated: bool,
    pub notes: Vec<String>,
}

impl Fixture {
    pub fn coords(&self) -> Vec<Point> {
        self.points.iter().map(|p| p.coords.clone()).collect()
    }
}

fn p(x: i64, y: i64) -> Point {
    Point::from_ints(x, y)
}

fn locate_all(body: &ConvexBody, pts: &[Point]) -> Result<Vec<BoundaryPoint>, BodyError> {
    pts.iter().map(|q| body.locate(q)).collect()
}

fn simple(name: &str, body: ConvexBody, pts: &[Point], expected: Vec<Expected>, notes: &[&str]) -> Fixture {
    let points = locate_all(&body, pts).expect("fixture points lie on the boundary");
    Fixture {
        name: name.into(),
        body,
        points,
        expected,
        truncated: false,
        notes: notes.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn square() -> ConvexBody {
    ConvexBody::polygon(&[p(-1, -1), p(1, -1), p(1, 1), p(-1, 1)]).expect("square")
}

use Outcome::{Empty as E, Nonempty as N};

/// `[-2,2] x [0,1]` with `(-1,0)`, `(1,0)`, `(0,1)`: every sector system is
/// empty, yet the points do not fix the body (horizontal translations).
pub fn rectangle_remark() -> Fixture {
    let body = ConvexBody::polygon(&[p(-2, 0), p(2, 0), p(2, 1), p(-2, 1)]).expect("rectangle");
    let tests = [Some(E), Some(E), Some(E), Some(E), Some(N)];
    simple(
        "rectangle_remark",
        body,
        &[p(-1, 0), p(1, 0), p(0, 1)],
        vec![
            Expected { question: Question::Fix, status: Status::FirstOrderIndeterminate, tests },
            Expected { question: Question::AlmostFix, status: Status::FirstOrderIndeterminate, tests },
        ],
        &["the points do not fix the body although every closed sector intersection is empty"],
    )
}

pub fn square_opposite_corners() -> Fixture {
    simple(
        "square_opposite_corners",
        square(),
        &[p(1, 1), p(-1, -1)],
        vec![
            Expected { question: Question::Fix, status: Status::NotWeaklyFix, tests: [Some(N), Some(N), None, None, None] },
            Expected { question: Question::AlmostFix, status: Status::Positive, tests: [Some(E); 5] },
        ],
        &[],
    )
}

pub fn square_straddle() -> Fixture {
    let q = |x: Scalar, y: Scalar| Point::new(x, y);
    let pts = [q(int(1), rat(9, 10)), q(rat(9, 10), int(1)), q(int(-1), rat(-9, 10)), q(rat(-9, 10), int(-1))];
    simple(
        "square_straddle",
        square(),
        &pts,
        vec![
            Expected { question: Question::Fix, status: Status::Positive, tests: [Some(E); 5] },
            Expected { question: Question::AlmostFix, status: Status::Positive, tests: [Some(E); 5] },
        ],
        &[],
    )
}

pub fn square_midpoints() -> Fixture {
    simple(
        "square_midpoints",
        square(),
        &[p(1, 0), p(0, 1), p(-1, 0), p(0, -1)],
        vec![Expected {
            question: Question::Fix,
            status: Status::FirstOrderIndeterminate,
            tests: [Some(E), Some(E), Some(N), Some(N), Some(E)],
        }],
        &["all four normals pass through the center"],
    )
}

fn unit(theta: f64) -> Point {
    Point::from_f64(theta.cos(), theta.sin())
}

fn dir(theta: f64) -> Direction {
    Direction::new(unit(theta)).expect("unit")
}

fn arc(from: f64, to: f64) -> BoundaryElement {
    BoundaryElement::Arc { center: Point::origin(), radius: int(1), from: dir(from), to: dir(to) }
}

/// Crossing of the tangent lines to the unit circle at angles `a < b`.
fn crossing(a: f64, b: f64) -> Point {
    let t = ((b - a) / 2.0).tan();
    Point::from_f64(a.cos() - t * a.sin(), a.sin() + t * a.cos())
}

/// Tangent segments running from the tangency point at `angles[0]` to the
/// one at `angles.last()`, through the crossings of consecutive tangents.
fn tangent_chain(angles: &[f64]) -> Vec<BoundaryElement> {
    let mut pts = vec![unit(angles[0])];
    for w in angles.windows(2) {
        pts.push(crossing(w[0], w[1]));
    }
    pts.push(unit(*angles.last().expect("nonempty")));
    pts.windows(2).map(|w| BoundaryElement::segment(w[0].clone(), w[1].clone())).collect()
}

fn axis_points() -> Vec<Point> {
    vec![p(0, 1), p(-1, 0), p(0, -1), p(1, 0)]
}

fn check_range(n: u32, min: u32, max: u32) -> Result<(), FixtureError> {
    if n < min || n > max {
        return Err(FixtureError::OutOfRange { value: n as i64, min: min as i64, max: max as i64 });
    }
    Ok(())
}

/// Unit circle arc over `|theta|` in `[pi/4, pi]` completed by tangent
/// segments touching the circle at `theta = 0` and `+-pi/2^n`, `3 <= n <= N`.
/// Consecutive tangent lines meet at their crossing. The points are the four
/// axis points of the circle.
pub fn example_e1(n: u32) -> Result<Fixture, FixtureError> {
    check_range(n, 2, 20)?;
    let mut elements = vec![arc(PI / 4.0, 3.0 * PI / 4.0), arc(3.0 * PI / 4.0, 5.0 * PI / 4.0), arc(5.0 * PI / 4.0, 7.0 * PI / 4.0)];
    let mut angles = vec![-PI / 4.0];
    angles.extend((3..=n).map(|k| -PI / 2f64.powi(k as i32)));
    angles.push(0.0);
    angles.extend((3..=n).rev().map(|k| PI / 2f64.powi(k as i32)));
    angles.push(PI / 4.0);
    let mut chain = tangent_chain(&angles);
    // The segment through (1,0) is x = 1 exactly.
    let mid = angles.iter().position(|&a| a == 0.0).expect("zero contact");
    let y = |a: f64, b: f64| crossing(a, b).y;
    let lo = Point::new(int(1), y(angles[mid - 1], 0.0));
    let hi = Point::new(int(1), y(0.0, angles[mid + 1]));
    if let BoundaryElement::Segment { b, .. } = &mut chain[mid - 1] {
        *b = lo.clone();
    }
    chain[mid] = BoundaryElement::segment(lo, hi.clone());
    if let BoundaryElement::Segment { a, .. } = &mut chain[mid + 1] {
        *a = hi;
    }
    elements.extend(chain);
    let body = ConvexBody::new(elements, Precision::tolerant_default())?;
    let points = locate_all(&body, &axis_points())?;
    Ok(Fixture {
        name: format!("example_e1_{n}"),
        body,
        points,
        expected: vec![Expected {
            question: Question::Fix,
            status: Status::FirstOrderIndeterminate,
            tests: [None; 5],
        }],
        truncated: true,
        notes: vec![
            format!("contacts at theta = 0 and +-pi/2^k for 3 <= k <= {n}; the full construction has infinitely many"),
            "segments join consecutive tangent lines at their crossing".into(),
            "no claim about the untruncated body is checked on this fixture".into(),
        ],
    })
}

/// Corner `p_k` of the hull of the unit circle and its outer points.
pub fn e2_corner(k: u32) -> (f64, f64) {
    let a = PI / 4f64.powi(k as i32);
    let r = 1.0 / a.cos();
    (r * (3.0 * a).cos(), r * (3.0 * a).sin())
}

/// Convex hull of the unit circle and `p_2, ..., p_N`: circle arcs over
/// `[pi/4, 2pi + 2pi/4^N]` and `[pi/4^k, 2pi/4^k]` for `2 <= k < N`, joined
/// by tangent segments crossing at the `p_k`. The arc below `p_N` closes the
/// truncation. The points are the four axis points of the circle.
pub fn example_e2(n: u32) -> Result<Fixture, FixtureError> {
    check_range(n, 2, 12)?;
    let q = |k: u32| PI / 4f64.powi(k as i32);
    let tau = 2.0 * PI;
    let mut elements = vec![
        arc(PI / 4.0, 3.0 * PI / 4.0),
        arc(3.0 * PI / 4.0, 5.0 * PI / 4.0),
        arc(5.0 * PI / 4.0, 7.0 * PI / 4.0),
        arc(7.0 * PI / 4.0, tau + 2.0 * q(n)),
    ];
    for k in (2..=n).rev() {
        elements.extend(tangent_chain(&[2.0 * q(k), 4.0 * q(k)]));
        if k > 2 {
            elements.push(arc(q(k - 1), 2.0 * q(k - 1)));
        }
    }
    let body = ConvexBody::new(elements, Precision::tolerant_default())?;
    let points = locate_all(&body, &axis_points())?;
    Ok(Fixture {
        name: format!("example_e2_{n}"),
        body,
        points,
        expected: Vec::new(),
        truncated: true,
        notes: vec![
            format!("corners p_k for 2 <= k <= {n}; the full construction has infinitely many"),
            "near (1,0) the full construction needs both refined points on the same side".into(),
            "no claim about the untruncated body is checked on this fixture".into(),
        ],
    })
}

/// Unit disc as four quarter arcs, tolerant.
pub fn unit_disc() -> ConvexBody {
    let axis = |x, y| Direction::from_ints(x, y).expect("axis");
    let quarter = |a: Direction, b: Direction| BoundaryElement::Arc { center: Point::origin(), radius: int(1), from: a, to: b };
    ConvexBody::new(
        vec![
            quarter(axis(1, 0), axis(0, 1)),
            quarter(axis(0, 1), axis(-1, 0)),
            quarter(axis(-1, 0), axis(0, -1)),
            quarter(axis(0, -1), axis(1, 0)),
        ],
        Precision::tolerant_default(),
    )
    .expect("disc")
}

const SNAP: i64 = 1 << 24;

/// Regular `k`-gon centered at the origin with vertices snapped to multiples
/// of `2^-24`.
pub fn regular_polygon(k: u32, circumradius: &Scalar) -> Result<ConvexBody, FixtureError> {
    check_range(k, 3, 64)?;
    let r = crate::geom::scalar_to_f64(circumradius);
    let snap = |v: f64| Scalar::new(((v * SNAP as f64).round() as i64).into(), SNAP.into());
    let vs: Vec<Point> = (0..k)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / k as f64;
            Point::new(snap(r * th.cos()), snap(r * th.sin()))
        })
        .collect();
    Ok(ConvexBody::polygon(&vs)?)
}

const RANDOM_RANGE: i64 = 10_000;
const RANDOM_RETRIES: usize = 8;

/// Edge components summing to zero from `k` distinct sorted values split
/// into two monotone chains.
fn valtr_components(rng: &mut ChaCha8Rng, k: usize) -> Vec<i64> {
    let mut vals: Vec<i64> = rand::seq::index::sample(rng, RANDOM_RANGE as usize, k)
        .into_iter()
        .map(|v| v as i64)
        .collect();
    vals.sort_unstable();
    let (lo, hi) = (vals[0], vals[k - 1]);
    let (mut last_a, mut last_b) = (lo, lo);
    let mut out = Vec::with_capacity(k);
    for &v in &vals[1..k - 1] {
        if rng.gen::<bool>() {
            out.push(v - last_a);
            last_a = v;
        } else {
            out.push(last_b - v);
            last_b = v;
        }
    }
    out.push(hi - last_a);
    out.push(last_b - hi);
    out
}

/// Seeded random convex `k`-gon with integer vertices.
pub fn random_convex_polygon(seed: u64, k: u32) -> Result<ConvexBody, FixtureError> {
    check_range(k, 3, 64)?;
    let k = k as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_RETRIES {
        let xs = valtr_components(&mut rng, k);
        let mut ys = valtr_components(&mut rng, k);
        ys.shuffle(&mut rng);
        let mut edges: Vec<Direction> = xs
            .iter()
            .zip(&ys)
            .filter_map(|(&x, &y)| Direction::from_ints(x, y))
            .collect();
        if edges.len() != k {
            continue;
        }
        edges.sort_by(|a, b| a.angle_cmp(b));
        if edges.windows(2).any(|w| w[0].same_ray(&w[1])) || edges[0].same_ray(&edges[k - 1]) {
            continue;
        }
        let mut v = Point::origin();
        let mut vs = Vec::with_capacity(k);
        for e in &edges {
            vs.push(v.clone());
            v = &v + e.vec();
        }
        if let Ok(body) = ConvexBody::polygon(&vs) {
            return Ok(body);
        }
    }
    Err(FixtureError::Degenerate)
}

/// Names accepted by [`by_name`]; `N`, `K` and `SEED` are integers.
pub const FIXTURE_NAMES: [&str; 10] =
    ["remark", "opposite-corners", "straddle", "midpoints", "square", "disc", "e1-N", "e2-N", "regular-K", "random-SEED-K"];

/// Body and points of a fixture named as in [`FIXTURE_NAMES`]. Bare bodies
/// come with no points.
pub fn by_name(name: &str) -> Result<(ConvexBody, Vec<BoundaryPoint>), FixtureError> {
    let unknown = || FixtureError::Unknown(name.to_string());
    let num = |s: &str| s.parse::<u64>().map_err(|_| unknown());
    let small = |s: &str| num(s).and_then(|v| u32::try_from(v).map_err(|_| unknown()));
    let pair = |f: Fixture| (f.body, f.points);
    let parts: Vec<&str> = name.split('-').collect();
    Ok(match parts[..] {
        ["remark"] => pair(rectangle_remark()),
        ["opposite", "corners"] => pair(square_opposite_corners()),
        ["straddle"] => pair(square_straddle()),
        ["midpoints"] => pair(square_midpoints()),
        ["square"] => (square(), Vec::new()),
        ["disc"] => (unit_disc(), Vec::new()),
        ["e1", n] => pair(example_e1(small(n)?)?),
        ["e2", n] => pair(example_e2(small(n)?)?),
        ["regular", k] => (regular_polygon(small(k)?, &int(1))?, Vec::new()),
        ["random", seed, k] => (random_convex_polygon(num(seed)?, small(k)?)?, Vec::new()),
        _ => return Err(unknown()),
    })
}

/// Every fixed named fixture.
pub fn named() -> Vec<Fixture> {
    vec![rectangle_remark(), square_opposite_corners(), square_straddle(), square_midpoints()]
}
