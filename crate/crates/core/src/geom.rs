//! Exact planar primitives: rational scalars, points, directions, oriented
//! lines, half-planes and rigid motions.
//!
//! Every predicate here is a sign test on a polynomial in the inputs, so with
//! rational inputs the answer is exact. A [`Precision::Tolerant`] mode exists
//! for bodies whose data is only known approximately (circular arcs with
//! irrational tangency points); in that mode a predicate whose value is within
//! `tau` of zero is reported as [`NearDegenerate`] instead of being guessed.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `n/d`, reduced. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Exact value of a finite binary float. Non-finite input maps to zero.
pub fn scalar_from_f64(v: f64) -> Scalar {
    Scalar::from_float(v).unwrap_or_else(Scalar::zero)
}

pub fn scalar_to_f64(v: &Scalar) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// `2^-k`.
pub fn pow2_neg(k: u32) -> Scalar {
    Scalar::new(BigInt::one(), BigInt::one() << k as usize)
}

/// `10^-k`.
pub fn pow10_neg(k: u32) -> Scalar {
    Scalar::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseScalarError(pub String);

/// Parses `"num/den"`, an integer, or a decimal literal (optionally with an
/// exponent, e.g. `"-1.25e-3"`). Decimal literals are converted exactly.
pub fn parse_scalar(s: &str) -> Result<Scalar, ParseScalarError> {
    let err = || ParseScalarError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Scalar::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| err())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(err());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{ip}{fp}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err())?
    };
    if neg {
        num = -num;
    }
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Scalar::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Scalar::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_scalar(v: &Scalar) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Square root when `v` is the square of a rational.
pub fn exact_sqrt(v: &Scalar) -> Option<Scalar> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(Scalar::new(n, d))
    } else {
        None
    }
}

/// Predicate value too close to zero to certify a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("predicate within tolerance of zero")]
pub struct NearDegenerate;

pub const DEFAULT_TAU_EXPONENT: u32 = 9;

/// How sign predicates are evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Precision {
    Exact,
    /// Values within `tau` (in length units) of zero are near-degenerate.
    Tolerant { tau: Scalar },
}

impl Precision {
    pub fn tolerant_default() -> Self {
        Precision::Tolerant { tau: pow10_neg(DEFAULT_TAU_EXPONENT) }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Precision::Exact)
    }

    pub fn tau(&self) -> Option<&Scalar> {
        match self {
            Precision::Exact => None,
            Precision::Tolerant { tau } => Some(tau),
        }
    }

    /// Sign of `value`, where `value / sqrt(scale2)` is a signed distance.
    pub fn sign(&self, value: &Scalar, scale2: &Scalar) -> Result<Ordering, NearDegenerate> {
        let s = value.cmp(&Scalar::zero());
        match self {
            Precision::Exact => Ok(s),
            Precision::Tolerant { tau } => {
                if value * value < tau * tau * scale2 {
                    Err(NearDegenerate)
                } else {
                    Ok(s)
                }
            }
        }
    }

    /// Sign of a floating-point signed distance.
    pub fn sign_f64(&self, value: f64) -> Result<Ordering, NearDegenerate> {
        let tau = self.tau().map(scalar_to_f64).unwrap_or(0.0);
        if value.abs() < tau || value.is_nan() {
            return Err(NearDegenerate);
        }
        Ok(value.partial_cmp(&0.0).unwrap_or(Ordering::Equal))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_scalar(&self.x), format_scalar(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(int(x), int(y))
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        Point::new(scalar_from_f64(x), scalar_from_f64(y))
    }

    pub fn origin() -> Self {
        Point::new(Scalar::zero(), Scalar::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn cross(&self, o: &Point) -> Scalar {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn dot(&self, o: &Point) -> Scalar {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn norm2(&self) -> Scalar {
        self.dot(self)
    }

    pub fn scale(&self, k: &Scalar) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    /// Quarter turn counterclockwise: `(x, y) -> (-y, x)`.
    pub fn rot90(&self) -> Point {
        Point::new(-&self.y, self.x.clone())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (scalar_to_f64(&self.x), scalar_to_f64(&self.y))
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-&self.x, -&self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        &self + &o
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        &self - &o
    }
}

/// A nonzero vector standing for the ray it spans. Scaling by a positive
/// factor gives the same direction; equality of rays is [`Direction::same_ray`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Direction(Point);

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dir{:?}", self.0)
    }
}

impl Direction {
    pub fn new(v: Point) -> Option<Self> {
        (!v.is_zero()).then_some(Direction(v))
    }

    pub fn from_ints(x: i64, y: i64) -> Option<Self> {
        Direction::new(Point::from_ints(x, y))
    }

    pub fn vec(&self) -> &Point {
        &self.0
    }

    pub fn into_vec(self) -> Point {
        self.0
    }

    pub fn rot90(&self) -> Direction {
        Direction(self.0.rot90())
    }

    pub fn rot270(&self) -> Direction {
        Direction(-&self.0.rot90())
    }

    pub fn reversed(&self) -> Direction {
        Direction(-&self.0)
    }

    pub fn cross(&self, o: &Direction) -> Scalar {
        self.0.cross(&o.0)
    }

    pub fn dot(&self, o: &Direction) -> Scalar {
        self.0.dot(&o.0)
    }

    pub fn same_ray(&self, o: &Direction) -> bool {
        self.cross(o).is_zero() && self.dot(o).is_positive()
    }

    /// Representative with `max(|x|, |y|) = 1`; equal rays give equal values.
    pub fn canonical(&self) -> Direction {
        let m = std::cmp::max(self.0.x.abs(), self.0.y.abs());
        Direction(self.0.scale(&m.recip()))
    }

    /// 0 for angles in `[0, pi)`, 1 for `[pi, 2pi)`.
    fn half(&self) -> u8 {
        let y = &self.0.y;
        if y.is_positive() || (y.is_zero() && self.0.x.is_positive()) {
            0
        } else {
            1
        }
    }

    /// Orders directions by counterclockwise angle from `(1, 0)`, in `[0, 2pi)`.
    pub fn angle_cmp(&self, o: &Direction) -> Ordering {
        self.half().cmp(&o.half()).then_with(|| {
            match self.cross(o).cmp(&Scalar::zero()) {
                Ordering::Greater => Ordering::Less,
                Ordering::Less => Ordering::Greater,
                Ordering::Equal => Ordering::Equal,
            }
        })
    }

    /// Rotates by the rational unit vector `rotor`.
    pub fn rotated(&self, rotor: &Rotor) -> Direction {
        Direction(rotor.apply(&self.0))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        self.0.to_f64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    On,
    Right,
}

impl Side {
    pub fn from_ordering(o: Ordering) -> Side {
        match o {
            Ordering::Greater => Side::Left,
            Ordering::Equal => Side::On,
            Ordering::Less => Side::Right,
        }
    }

    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::On => Side::On,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientedLine {
    pub base: Point,
    pub dir: Direction,
}

impl OrientedLine {
    pub fn new(base: Point, dir: Direction) -> Self {
        OrientedLine { base, dir }
    }

    /// `cross(dir, p - base)`; positive on the left.
    pub fn value(&self, p: &Point) -> Scalar {
        self.dir.vec().cross(&(p - &self.base))
    }

    pub fn side_of(&self, p: &Point) -> Side {
        Side::from_ordering(self.value(p).cmp(&Scalar::zero()))
    }

    pub fn side_of_with(&self, p: &Point, precision: &Precision) -> Result<Side, NearDegenerate> {
        precision
            .sign(&self.value(p), &self.dir.vec().norm2())
            .map(Side::from_ordering)
    }

    pub fn reversed(&self) -> OrientedLine {
        OrientedLine::new(self.base.clone(), self.dir.reversed())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Closure {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfPlane {
    pub line: OrientedLine,
    pub side: HalfSide,
    pub closure: Closure,
}

impl HalfPlane {
    pub fn new(line: OrientedLine, side: HalfSide, closure: Closure) -> Self {
        HalfPlane { line, side, closure }
    }

    /// Side of `p` relative to this half-plane: `Left` means strictly inside.
    pub fn relative_side(&self, p: &Point) -> Side {
        let s = self.line.side_of(p);
        match self.side {
            HalfSide::Left => s,
            HalfSide::Right => s.flipped(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self.relative_side(p), self.closure) {
            (Side::Left, _) => true,
            (Side::On, Closure::Closed) => true,
            _ => false,
        }
    }
}

/// A rational point `(c, s)` on the unit circle, used as a rotation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rotor {
    pub c: Scalar,
    pub s: Scalar,
}

impl fmt::Debug for Rotor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rotor({}, {})", format_scalar(&self.c), format_scalar(&self.s))
    }
}

impl Rotor {
    pub fn identity() -> Self {
        Rotor { c: Scalar::one(), s: Scalar::zero() }
    }

    pub fn quarter() -> Self {
        Rotor { c: Scalar::zero(), s: Scalar::one() }
    }

    pub fn is_unit(&self) -> bool {
        &self.c * &self.c + &self.s * &self.s == Scalar::one()
    }

    pub fn inverse(&self) -> Rotor {
        Rotor { c: self.c.clone(), s: -&self.s }
    }

    pub fn then(&self, o: &Rotor) -> Rotor {
        Rotor {
            c: &self.c * &o.c - &self.s * &o.s,
            s: &self.s * &o.c + &self.c * &o.s,
        }
    }

    pub fn apply(&self, v: &Point) -> Point {
        Point::new(&self.c * &v.x - &self.s * &v.y, &self.s * &v.x + &self.c * &v.y)
    }
}

/// Half-angle tangent map `t -> ((1 - t^2) / (1 + t^2), 2t / (1 + t^2))`.
/// The angle is `2 atan(t)`, so about `2t` for small `t`.
pub fn rational_rotation(t: &Scalar) -> Rotor {
    let t2 = t * t;
    let den = Scalar::one() + &t2;
    Rotor {
        c: (Scalar::one() - &t2) / &den,
        s: (t * int(2)) / den,
    }
}

/// Rigid motion of the plane with exact rational data.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum RigidMotion {
    Identity,
    Rotation { center: Point, rotor: Rotor },
    Translation { v: Point },
}

impl fmt::Debug for RigidMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RigidMotion::Identity => write!(f, "id"),
            RigidMotion::Rotation { center, rotor } => write!(f, "rot[{center:?}, {rotor:?}]"),
            RigidMotion::Translation { v } => write!(f, "trans{v:?}"),
        }
    }
}

impl RigidMotion {
    pub fn rotation(center: Point, rotor: Rotor) -> Self {
        RigidMotion::Rotation { center, rotor }
    }

    pub fn translation(v: Point) -> Self {
        RigidMotion::Translation { v }
    }

    pub fn apply(&self, p: &Point) -> Point {
        match self {
            RigidMotion::Identity => p.clone(),
            RigidMotion::Rotation { center, rotor } => center + &rotor.apply(&(p - center)),
            RigidMotion::Translation { v } => p + v,
        }
    }

    pub fn inverse(&self) -> RigidMotion {
        match self {
            RigidMotion::Identity => RigidMotion::Identity,
            RigidMotion::Rotation { center, rotor } => RigidMotion::rotation(center.clone(), rotor.inverse()),
            RigidMotion::Translation { v } => RigidMotion::translation(-v),
        }
    }

    /// Linear part and offset: `p -> rotor(p) + offset`.
    fn affine(&self) -> (Rotor, Point) {
        match self {
            RigidMotion::Identity => (Rotor::identity(), Point::origin()),
            RigidMotion::Rotation { center, rotor } => (rotor.clone(), center - &rotor.apply(center)),
            RigidMotion::Translation { v } => (Rotor::identity(), v.clone()),
        }
    }

    fn from_affine(rotor: Rotor, offset: Point) -> RigidMotion {
        if rotor.s.is_zero() && rotor.c.is_one() {
            if offset.is_zero() {
                RigidMotion::Identity
            } else {
                RigidMotion::translation(offset)
            }
        } else {
            // Fixed point solves (I - M) w = offset; det(I - M) = 2(1 - c) > 0.
            let a = Scalar::one() - &rotor.c;
            let det = &a * &a + &rotor.s * &rotor.s;
            let x = (&a * &offset.x - &rotor.s * &offset.y) / &det;
            let y = (&rotor.s * &offset.x + &a * &offset.y) / &det;
            RigidMotion::rotation(Point::new(x, y), rotor)
        }
    }

    /// `self` after `first`: `p -> self(first(p))`.
    pub fn compose(&self, first: &RigidMotion) -> RigidMotion {
        let (r2, o2) = self.affine();
        let (r1, o1) = first.affine();
        let rotor = r1.then(&r2);
        let offset = &r2.apply(&o1) + &o2;
        RigidMotion::from_affine(rotor, offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn side_of_examples() {
        let north = OrientedLine::new(p(0, 0), Direction::from_ints(0, 1).unwrap());
        assert_eq!(north.side_of(&p(-1, 0)), Side::Left);
        assert_eq!(north.side_of(&p(0, 5)), Side::On);
        let shifted = OrientedLine::new(p(-1, 0), Direction::from_ints(0, 1).unwrap());
        assert_eq!(shifted.side_of(&Point::new(int(-2), rat(1, 2))), Side::Left);
    }

    #[test]
    fn rational_rotation_examples() {
        assert_eq!(rational_rotation(&int(0)), Rotor::identity());
        assert_eq!(rational_rotation(&rat(1, 2)), Rotor { c: rat(3, 5), s: rat(4, 5) });
        assert_eq!(rational_rotation(&int(1)), Rotor::quarter());
    }

    #[test]
    fn apply_motion_examples() {
        let any = RigidMotion::rotation(p(2, 3), rational_rotation(&rat(1, 3)));
        assert_eq!(any.apply(&p(2, 3)), p(2, 3));
        let quarter = RigidMotion::rotation(p(0, 0), Rotor::quarter());
        assert_eq!(quarter.apply(&p(1, 0)), p(0, 1));
        let r = RigidMotion::rotation(p(0, 0), Rotor { c: rat(3, 5), s: rat(4, 5) });
        assert_eq!(r.apply(&p(1, 0)), Point::new(rat(3, 5), rat(4, 5)));
    }

    #[test]
    fn inverse_and_compose_examples() {
        assert_eq!(RigidMotion::translation(p(1, 2)).inverse(), RigidMotion::translation(p(-1, -2)));
        let rot = RigidMotion::rotation(p(1, 1), Rotor { c: rat(3, 5), s: rat(4, 5) });
        assert_eq!(rot.inverse(), RigidMotion::rotation(p(1, 1), Rotor { c: rat(3, 5), s: rat(-4, 5) }));
        let c = RigidMotion::translation(p(1, 0)).compose(&RigidMotion::translation(p(-1, 0)));
        assert_eq!(c, RigidMotion::Identity);
        assert_eq!(rot.compose(&rot.inverse()), RigidMotion::Identity);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let a = RigidMotion::rotation(p(1, -2), rational_rotation(&rat(2, 7)));
        let b = RigidMotion::translation(Point::new(rat(1, 3), int(4)));
        let q = Point::new(rat(5, 2), rat(-1, 9));
        assert_eq!(a.compose(&b).apply(&q), a.apply(&b.apply(&q)));
        assert_eq!(b.compose(&a).apply(&q), b.apply(&a.apply(&q)));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_scalar("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_scalar("-7").unwrap(), int(-7));
        assert_eq!(parse_scalar("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_scalar("-1.5e-3").unwrap(), rat(-3, 2000));
        assert_eq!(parse_scalar("2E2").unwrap(), int(200));
        assert_eq!(parse_scalar(".5").unwrap(), rat(1, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
        assert_eq!(format_scalar(&rat(-6, 4)), "-3/2");
        assert_eq!(format_scalar(&int(5)), "5");
    }

    #[test]
    fn exact_sqrt_only_for_squares() {
        assert_eq!(exact_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(exact_sqrt(&int(2)), None);
        assert_eq!(exact_sqrt(&int(-4)), None);
    }

    #[test]
    fn tolerant_sign_flags_small_values() {
        let tol = Precision::tolerant_default();
        assert_eq!(tol.sign(&pow10_neg(12), &int(1)), Err(NearDegenerate));
        assert_eq!(tol.sign(&pow10_neg(3), &int(1)), Ok(Ordering::Greater));
        assert_eq!(Precision::Exact.sign(&pow10_neg(30), &int(1)), Ok(Ordering::Greater));
    }

    #[test]
    fn angle_order_goes_counterclockwise_from_east() {
        let mut ds: Vec<Direction> = [(0, -1), (1, 0), (-1, 0), (0, 1), (1, 1), (1, -1)]
            .iter()
            .map(|&(x, y)| Direction::from_ints(x, y).unwrap())
            .collect();
        ds.sort_by(|a, b| a.angle_cmp(b));
        let got: Vec<(i64, i64)> = ds
            .iter()
            .map(|d| (d.vec().x.to_integer().try_into().unwrap(), d.vec().y.to_integer().try_into().unwrap()))
            .collect();
        assert_eq!(got, vec![(1, 0), (1, 1), (0, 1), (-1, 0), (0, -1), (1, -1)]);
    }
}
