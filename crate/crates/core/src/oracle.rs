//! Brute-force checks with actual rigid motions: exact validation of
//! classifier witnesses, a seeded escape-motion search near the identity and
//! sampled motion paths.
//!
//! A point `a` is inside the moved body `f(K)` iff `f^-1(a)` is inside `K`, so
//! only the static body is ever queried.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::body::{ConvexBody, Location};
use crate::classify::Sense;
use crate::geom::{
    int, pow10_neg, pow2_neg, rational_rotation, scalar_from_f64, scalar_to_f64, Direction, OrientedLine, Point,
    RigidMotion, Scalar,
};
use crate::sectors::normals_at;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exact validation needs an exact body")]
    InexactModeUnsupported,
}

/// Half-angle parameters `10^-2, ..., 10^-8`.
pub fn default_rotation_schedule() -> Vec<Scalar> {
    (2..=8).map(pow10_neg).collect()
}

/// Translation magnitudes `2^-1, ..., 2^-10`.
pub fn default_translation_schedule() -> Vec<Scalar> {
    (1..=10).map(pow2_neg).collect()
}

/// Body motion realising a rotation witness: for `Cw` the points turn
/// clockwise relative to the body, so the body turns counterclockwise.
pub fn rotation_motion(center: &Point, sense: Sense, t: &Scalar) -> RigidMotion {
    let rotor = rational_rotation(t);
    let rotor = match sense {
        Sense::Cw => rotor,
        Sense::Ccw => rotor.inverse(),
    };
    RigidMotion::rotation(center.clone(), rotor)
}

/// Body displacement `m * d`.
pub fn translation_motion(d: &Direction, m: &Scalar) -> RigidMotion {
    RigidMotion::translation(d.vec().scale(m))
}

/// First point strictly inside the moved body. Undecidable membership in
/// tolerant mode counts as penetration.
pub fn first_penetration(body: &ConvexBody, pts: &[Point], motion: &RigidMotion) -> Option<usize> {
    let inv = motion.inverse();
    pts.iter().position(|a| !matches!(body.contains(&inv.apply(a)), Ok(Location::Boundary | Location::Exterior)))
}

/// True iff some scheduled magnitude is penetration-free and so is every
/// smaller one. The schedule may be given in any order.
fn downward_closed(body: &ConvexBody, pts: &[Point], schedule: &[Scalar], motion: impl Fn(&Scalar) -> RigidMotion) -> bool {
    let mut sorted: Vec<&Scalar> = schedule.iter().collect();
    sorted.sort();
    let passes: Vec<bool> = sorted.iter().map(|m| first_penetration(body, pts, &motion(m)).is_none()).collect();
    let k = passes.iter().take_while(|&&p| p).count();
    k > 0 && passes[k..].iter().all(|&p| !p)
}

/// Smallest ratio, over the points, of the larger signed distance from
/// `center` to the point's two normal lines (positive on the side `sense`
/// needs) to the distance from `center` to the point. `None` when a point is
/// off the boundary or coincides with the center.
pub fn rotation_clearance(body: &ConvexBody, pts: &[Point], center: &Point, sense: Sense) -> Option<f64> {
    let mut worst = f64::INFINITY;
    for a in pts {
        let bp = body.locate(a).ok()?;
        let t = body.tangents_at(&bp).ok()?;
        let r = scalar_to_f64(&(center - a).norm2()).sqrt();
        if r == 0.0 {
            return None;
        }
        let (nl, nr) = normals_at(a, &t);
        let side = |l: &OrientedLine| {
            let d = scalar_to_f64(&l.value(center)) / scalar_to_f64(&l.dir.vec().norm2()).sqrt();
            match sense {
                Sense::Cw => d,
                Sense::Ccw => -d,
            }
        };
        worst = worst.min(side(&nl).max(side(&nr)) / r);
    }
    Some(worst)
}

/// `schedule` shrunk by the largest power of two not above the witness
/// clearance. Rotations about a center nearly on a normal line only clear the
/// point for angles below about twice the clearance.
pub fn scaled_rotation_schedule(
    body: &ConvexBody,
    pts: &[Point],
    center: &Point,
    sense: Sense,
    schedule: &[Scalar],
) -> Vec<Scalar> {
    let k = match rotation_clearance(body, pts, center, sense) {
        Some(c) if c > 0.0 && c < 1.0 => (-c.log2()).ceil().min(1000.0) as u32,
        _ => 0,
    };
    let f = pow2_neg(k);
    schedule.iter().map(|t| t * &f).collect()
}

pub fn validate_rotation_witness(
    body: &ConvexBody,
    pts: &[Point],
    center: &Point,
    sense: Sense,
    schedule: &[Scalar],
) -> Result<bool, OracleError> {
    if !body.is_exact() {
        return Err(OracleError::InexactModeUnsupported);
    }
    Ok(downward_closed(body, pts, schedule, |t| rotation_motion(center, sense, t)))
}

pub fn validate_translation_witness(
    body: &ConvexBody,
    pts: &[Point],
    d: &Direction,
    schedule: &[Scalar],
) -> Result<bool, OracleError> {
    if !body.is_exact() {
        return Err(OracleError::InexactModeUnsupported);
    }
    Ok(downward_closed(body, pts, schedule, |m| translation_motion(d, m)))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EscapeFamily {
    Rotation { center: Point, sense: Sense },
    Translation { direction: Direction },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EscapeReport {
    pub family: EscapeFamily,
    /// Half-angle parameters for rotations, displacement lengths (in units of
    /// the direction vector) for translations.
    pub magnitudes: Vec<Scalar>,
    pub penetration_free: Vec<bool>,
    /// Position of the family in the candidate enumeration.
    pub candidate_index: usize,
    /// Rotations about the center of a disc body were skipped.
    pub disc_rotations_skipped: bool,
}

impl EscapeReport {
    pub fn motion(&self, magnitude: &Scalar) -> RigidMotion {
        match &self.family {
            EscapeFamily::Rotation { center, sense } => rotation_motion(center, *sense, magnitude),
            EscapeFamily::Translation { direction } => translation_motion(direction, magnitude),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeConfig {
    /// Half-width of the center grid and radius of the random center disc,
    /// around the bounding-box center. Defaults to four times the body extent.
    pub radius: Option<Scalar>,
    /// Total number of candidate families.
    pub samples: usize,
    pub seed: u64,
}

impl Default for EscapeConfig {
    fn default() -> Self {
        EscapeConfig { radius: None, samples: 10_000, seed: 0 }
    }
}

pub const MAX_ESCAPE_SAMPLES: usize = 1_000_000;
pub const CENTER_GRID: usize = 9;
const ROTATION_STEPS: u32 = 10;
const TRANSLATION_STEPS: u32 = 10;

/// Sixteen directions: the compass points and the 5-12-13 directions in each
/// quadrant, counterclockwise from east. Axis and 5-12-13 entries are unit
/// vectors; diagonals are `(+-1, +-1)`.
pub fn translation_net() -> Vec<Direction> {
    let mut v = Vec::new();
    for q in 0..4 {
        let base: [(i64, i64); 4] = [(13, 0), (12, 5), (13, 13), (5, 12)];
        for (x, y) in base {
            let (x, y) = match q {
                0 => (x, y),
                1 => (-y, x),
                2 => (-x, -y),
                _ => (y, -x),
            };
            let unit = Point::new(Scalar::new(x.into(), 13.into()), Scalar::new(y.into(), 13.into()));
            v.push(Direction::new(unit).expect("nonzero"));
        }
    }
    v
}

struct Frame {
    center: Point,
    radius: Scalar,
    extent_pow2: Scalar,
    disc_center: Option<Point>,
}

fn frame(body: &ConvexBody, radius: Option<&Scalar>) -> Frame {
    let ((x0, y0), (x1, y1)) = body.bbox_f64();
    let center = match body.bbox_exact() {
        Some((lo, hi)) => (&lo + &hi).scale(&Scalar::new(1.into(), 2.into())),
        None => Point::from_f64((x0 + x1) / 2.0, (y0 + y1) / 2.0),
    };
    let extent = (x1 - x0).max(y1 - y0);
    let mut extent_pow2 = Scalar::one();
    while crate::geom::scalar_to_f64(&extent_pow2) < extent {
        extent_pow2 *= int(2);
    }
    while crate::geom::scalar_to_f64(&extent_pow2) >= 2.0 * extent {
        extent_pow2 /= int(2);
    }
    let radius = radius.cloned().unwrap_or_else(|| scalar_from_f64(4.0 * extent));
    Frame { center, radius, extent_pow2, disc_center: body.full_disc().map(|(c, _)| c) }
}

fn rotation_magnitudes() -> Vec<Scalar> {
    (0..ROTATION_STEPS).map(|k| pow10_neg(2) * pow2_neg(k)).collect()
}

fn translation_magnitudes(f: &Frame) -> Vec<Scalar> {
    (1..=TRANSLATION_STEPS).map(|k| &f.extent_pow2 * pow2_neg(k + 2)).collect()
}

/// Candidate family number `i`: bounding-box center rotations, the
/// translation net, the center grid (both senses), then seeded random
/// centers.
fn candidate(f: &Frame, seed: u64, i: usize) -> EscapeFamily {
    let net = translation_net();
    let grid = 2 * CENTER_GRID * CENTER_GRID;
    let sense = |k: usize| if k % 2 == 0 { Sense::Cw } else { Sense::Ccw };
    if i < 2 {
        return EscapeFamily::Rotation { center: f.center.clone(), sense: sense(i) };
    }
    let i = i - 2;
    if i < net.len() {
        return EscapeFamily::Translation { direction: net[i].clone() };
    }
    let i = i - net.len();
    if i < grid {
        let cell = i / 2;
        let (gx, gy) = ((cell % CENTER_GRID) as i64, (cell / CENTER_GRID) as i64);
        let g = (CENTER_GRID - 1) as i64;
        let coord = |k: i64| &f.radius * Scalar::new((2 * k - g).into(), g.into());
        let center = &f.center + &Point::new(coord(gx), coord(gy));
        return EscapeFamily::Rotation { center, sense: sense(i) };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((i - grid) as u64);
    let den = 1i64 << 20;
    loop {
        let u: i64 = rng.gen_range(-den..=den);
        let v: i64 = rng.gen_range(-den..=den);
        if u * u + v * v <= den * den {
            let s = |k: i64| &f.radius * Scalar::new(k.into(), den.into());
            let center = &f.center + &Point::new(s(u), s(v));
            let sense = if rng.gen::<bool>() { Sense::Cw } else { Sense::Ccw };
            return EscapeFamily::Rotation { center, sense };
        }
    }
}

fn check(body: &ConvexBody, pts: &[Point], family: &EscapeFamily, mags: &[Scalar]) -> bool {
    mags.iter().all(|m| {
        let motion = match family {
            EscapeFamily::Rotation { center, sense } => rotation_motion(center, *sense, m),
            EscapeFamily::Translation { direction } => translation_motion(direction, m),
        };
        first_penetration(body, pts, &motion).is_none()
    })
}

/// Searches candidate motion families for one that keeps every point out of
/// the interior at every scheduled magnitude. `None` is not a proof of
/// fixing.
pub fn escape_search(body: &ConvexBody, pts: &[Point], config: &EscapeConfig) -> Option<EscapeReport> {
    let f = frame(body, config.radius.as_ref());
    let rot = rotation_magnitudes();
    let trans = translation_magnitudes(&f);
    let samples = config.samples.min(MAX_ESCAPE_SAMPLES);
    let skipped = f.disc_center.is_some();
    (0..samples).into_par_iter().find_map_first(|i| {
        let family = candidate(&f, config.seed, i);
        let mags = match &family {
            EscapeFamily::Rotation { center, .. } => {
                if f.disc_center.as_ref() == Some(center) {
                    return None;
                }
                &rot
            }
            EscapeFamily::Translation { .. } => &trans,
        };
        check(body, pts, &family, mags).then(|| EscapeReport {
            family,
            magnitudes: mags.clone(),
            penetration_free: vec![true; mags.len()],
            candidate_index: i,
            disc_rotations_skipped: skipped,
        })
    })
}

/// Motion path starting at the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MotionPath {
    /// Explicit samples `(t, motion)` in increasing `t`.
    Samples(Vec<(Scalar, RigidMotion)>),
    /// Rotation with half-angle parameter `t * max_t` at time `t`.
    Rotation { center: Point, sense: Sense, max_t: Scalar },
    /// Translation by `t * v` at time `t`.
    Translation { v: Point },
}

/// First sampled time at which a point is strictly inside the moved body.
/// Parametric paths are sampled at `t = j / steps`, `j = 1..=steps`.
pub fn simulate_path(body: &ConvexBody, pts: &[Point], path: &MotionPath, steps: usize) -> Option<(Scalar, usize)> {
    let sample = |t: &Scalar| match path {
        MotionPath::Samples(_) => unreachable!(),
        MotionPath::Rotation { center, sense, max_t } => rotation_motion(center, *sense, &(t * max_t)),
        MotionPath::Translation { v } => RigidMotion::translation(v.scale(t)),
    };
    match path {
        MotionPath::Samples(s) => {
            s.iter().find_map(|(t, m)| first_penetration(body, pts, m).map(|i| (t.clone(), i)))
        }
        _ => (1..=steps).find_map(|j| {
            let t = Scalar::new((j as i64).into(), (steps as i64).into());
            first_penetration(body, pts, &sample(&t)).map(|i| (t, i))
        }),
    }
}

/// Whether `motion` moves the body at all; the identity is excluded from
/// escape families.
pub fn is_identity(motion: &RigidMotion) -> bool {
    match motion {
        RigidMotion::Identity => true,
        RigidMotion::Rotation { rotor, .. } => rotor.s.is_zero() && rotor.c.is_one(),
        RigidMotion::Translation { v } => v.is_zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn square() -> ConvexBody {
        ConvexBody::polygon(&[p(-1, -1), p(1, -1), p(1, 1), p(-1, 1)]).unwrap()
    }

    fn remark() -> ConvexBody {
        ConvexBody::polygon(&[p(-2, 0), p(2, 0), p(2, 1), p(-2, 1)]).unwrap()
    }

    fn straddle() -> Vec<Point> {
        let q = |x: Scalar, y: Scalar| Point::new(x, y);
        vec![q(int(1), rat(9, 10)), q(rat(9, 10), int(1)), q(int(-1), rat(-9, 10)), q(rat(-9, 10), int(-1))]
    }

    fn d(x: i64, y: i64) -> Direction {
        Direction::from_ints(x, y).unwrap()
    }

    #[test]
    fn rotation_witnesses() {
        let s = default_rotation_schedule();
        let corners = [p(1, 1), p(-1, -1)];
        assert!(validate_rotation_witness(&square(), &corners, &p(0, 0), Sense::Cw, &s).unwrap());
        assert!(!validate_rotation_witness(&square(), &straddle(), &p(0, 0), Sense::Cw, &s).unwrap());
        let rp = [p(-1, 0), p(1, 0), p(0, 1)];
        let mid = Point::new(int(0), rat(1, 2));
        assert!(!validate_rotation_witness(&remark(), &rp, &mid, Sense::Cw, &s).unwrap());
    }

    #[test]
    fn far_centers_need_a_scaled_schedule() {
        let s = default_rotation_schedule();
        let bottom = [p(0, -1)];
        let far = Point::new(rat(-1, 1000), int(1_000_000));
        let c = rotation_clearance(&square(), &bottom, &far, Sense::Cw).unwrap();
        assert!((c - 1e-9).abs() < 1e-12);
        assert!(rotation_clearance(&square(), &bottom, &far, Sense::Ccw).unwrap() < 0.0);
        assert!(!validate_rotation_witness(&square(), &bottom, &far, Sense::Cw, &s).unwrap());
        let scaled = scaled_rotation_schedule(&square(), &bottom, &far, Sense::Cw, &s);
        assert_eq!(scaled[0], pow10_neg(2) * pow2_neg(30));
        assert!(validate_rotation_witness(&square(), &bottom, &far, Sense::Cw, &scaled).unwrap());
        let corners = [p(1, 1), p(-1, -1)];
        assert_eq!(scaled_rotation_schedule(&square(), &corners, &p(0, 0), Sense::Cw, &s)[0], pow10_neg(2) * pow2_neg(1));
    }

    #[test]
    fn translation_witnesses() {
        let s = default_translation_schedule();
        let rp = [p(-1, 0), p(1, 0), p(0, 1)];
        assert!(validate_translation_witness(&remark(), &rp, &d(1, 0), &s).unwrap());
        assert!(!validate_translation_witness(&remark(), &rp, &d(0, 1), &s).unwrap());
        for dir in [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)] {
            assert!(!validate_translation_witness(&square(), &straddle(), &d(dir.0, dir.1), &s).unwrap());
        }
    }

    #[test]
    fn escape_examples() {
        let cfg = EscapeConfig::default();
        let r = escape_search(&remark(), &[p(-1, 0), p(1, 0), p(0, 1)], &cfg).unwrap();
        assert_eq!(r.family, EscapeFamily::Translation { direction: d(1, 0) });
        assert_eq!(r.magnitudes.first(), Some(&rat(1, 2)));
        assert_eq!(r.magnitudes.last(), Some(&pow2_neg(10)));
        let r = escape_search(&square(), &[p(1, 1), p(-1, -1)], &cfg).unwrap();
        assert_eq!(r.family, EscapeFamily::Rotation { center: p(0, 0), sense: Sense::Cw });
    }

    #[test]
    fn net_has_sixteen_distinct_directions() {
        let net = translation_net();
        assert_eq!(net.len(), 16);
        assert!(net[0].same_ray(&d(1, 0)));
        for i in 0..16 {
            for j in 0..i {
                assert!(!net[i].same_ray(&net[j]));
            }
        }
    }

    #[test]
    fn paths() {
        let rp = [p(-1, 0), p(1, 0), p(0, 1)];
        let t = MotionPath::Translation { v: Point::new(rat(1, 2), int(0)) };
        assert_eq!(simulate_path(&remark(), &rp, &t, 100), None);
        let r = MotionPath::Rotation { center: Point::new(int(0), rat(1, 2)), sense: Sense::Cw, max_t: rat(1, 10) };
        let (time, _) = simulate_path(&remark(), &rp, &r, 100).unwrap();
        assert_eq!(time, rat(1, 100));
        let id = MotionPath::Samples(vec![(int(0), RigidMotion::Identity), (int(1), RigidMotion::Identity)]);
        assert_eq!(simulate_path(&square(), &straddle(), &id, 10), None);
        assert!(is_identity(&RigidMotion::translation(Point::origin())));
    }
}
