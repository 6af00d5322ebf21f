//! JSON documents for bodies, point lists, verdicts, escape reports and
//! placements. Rationals are strings (`"n"` or `"n/d"`; decimal literals are
//! accepted on input), so exact values survive a round trip. Field order is
//! fixed, which makes the output byte-stable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::body::{BodyError, BoundaryElement, BoundaryPoint, ConvexBody};
use crate::classify::{
    PlacementDescriptor, Question, Refinement, Sense, SideTag, Status, TestResults, Verdict, VerdictWitness,
};
use crate::feasibility::{FeasibilityResult, Witness};
use crate::geom::{format_scalar, parse_scalar, Direction, ParseScalarError, Point, Precision, Scalar};
use crate::oracle::{EscapeFamily, EscapeReport};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Scalar(#[from] ParseScalarError),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error("point {index}: {message}")]
    Point { index: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Pair = [String; 2];

pub fn pair(p: &Point) -> Pair {
    [format_scalar(&p.x), format_scalar(&p.y)]
}

pub fn parse_pair(v: &Pair) -> Result<Point, IoError> {
    Ok(Point::new(parse_scalar(&v[0])?, parse_scalar(&v[1])?))
}

fn parse_direction(v: &Pair) -> Result<Direction, IoError> {
    Direction::new(parse_pair(v)?).ok_or_else(|| IoError::Invalid("zero direction".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ElementFile {
    Segment { a: Pair, b: Pair },
    Arc { center: Pair, radius: String, from: Pair, to: Pair },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyFile {
    /// `"exact"` or `"tolerant"`.
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    pub elements: Vec<ElementFile>,
}

impl BodyFile {
    pub fn from_body(body: &ConvexBody) -> Self {
        let elements = body
            .elements()
            .iter()
            .map(|e| match e {
                BoundaryElement::Segment { a, b } => ElementFile::Segment { a: pair(a), b: pair(b) },
                BoundaryElement::Arc { center, radius, from, to } => ElementFile::Arc {
                    center: pair(center),
                    radius: format_scalar(radius),
                    from: pair(from.vec()),
                    to: pair(to.vec()),
                },
            })
            .collect();
        let (mode, tolerance) = mode_fields(body.precision());
        BodyFile { mode, tolerance, elements }
    }

    /// Builds the body; `precision` overrides the file's mode.
    pub fn to_body(&self, precision: Option<Precision>) -> Result<ConvexBody, IoError> {
        let precision = match precision {
            Some(p) => p,
            None => parse_mode(&self.mode, self.tolerance.as_deref())?,
        };
        let elements = self
            .elements
            .iter()
            .map(|e| {
                Ok(match e {
                    ElementFile::Segment { a, b } => BoundaryElement::segment(parse_pair(a)?, parse_pair(b)?),
                    ElementFile::Arc { center, radius, from, to } => BoundaryElement::Arc {
                        center: parse_pair(center)?,
                        radius: parse_scalar(radius)?,
                        from: parse_direction(from)?,
                        to: parse_direction(to)?,
                    },
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(ConvexBody::new(elements, precision)?)
    }
}

pub fn mode_fields(p: &Precision) -> (String, Option<String>) {
    match p {
        Precision::Exact => ("exact".into(), None),
        Precision::Tolerant { tau } => ("tolerant".into(), Some(format_scalar(tau))),
    }
}

pub fn parse_mode(mode: &str, tolerance: Option<&str>) -> Result<Precision, IoError> {
    match mode {
        "exact" => Ok(Precision::Exact),
        "tolerant" | "inexact" => match tolerance {
            Some(t) => Ok(Precision::Tolerant { tau: parse_scalar(t)? }),
            None => Ok(Precision::tolerant_default()),
        },
        other => Err(IoError::Invalid(format!("unknown mode {other:?}"))),
    }
}

/// A point given by boundary address, by coordinates, or both (the address
/// wins).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Pair>,
}

impl PointFile {
    pub fn from_point(bp: &BoundaryPoint) -> Self {
        PointFile { element: Some(bp.element), param: Some(format_scalar(&bp.param)), coords: Some(pair(&bp.coords)) }
    }
}

pub fn points_to_file(pts: &[BoundaryPoint]) -> Vec<PointFile> {
    pts.iter().map(PointFile::from_point).collect()
}

pub fn points_from_file(body: &ConvexBody, pts: &[PointFile]) -> Result<Vec<BoundaryPoint>, IoError> {
    pts.iter()
        .enumerate()
        .map(|(index, p)| {
            let err = |e: &dyn std::fmt::Display| IoError::Point { index, message: e.to_string() };
            match (&p.element, &p.param, &p.coords) {
                (Some(e), Some(t), coords) => {
                    let mut bp = body.point_at(*e, parse_scalar(t)?).map_err(|e| err(&e))?;
                    if let (Some(c), false) = (coords, body.is_exact()) {
                        bp.coords = parse_pair(c)?;
                        body.check_point(&bp).map_err(|e| err(&e))?;
                    }
                    Ok(bp)
                }
                (_, _, Some(c)) => body.locate(&parse_pair(c)?).map_err(|e| err(&e)),
                _ => Err(err(&"needs element and param, or coords")),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessFile {
    Point(Pair),
    Direction(Pair),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestFile {
    /// `EMPTY`, `NONEMPTY` or `NEAR_DEGENERATE`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessFile>,
}

impl TestFile {
    fn from_result(r: &FeasibilityResult) -> Self {
        match r {
            FeasibilityResult::Empty => TestFile { status: "EMPTY".into(), witness: None },
            FeasibilityResult::NearDegenerate => TestFile { status: "NEAR_DEGENERATE".into(), witness: None },
            FeasibilityResult::Nonempty(w) => TestFile {
                status: "NONEMPTY".into(),
                witness: Some(match w {
                    Witness::Point(p) => WitnessFile::Point(pair(p)),
                    Witness::Direction(d) => WitnessFile::Direction(pair(d.vec())),
                }),
            },
        }
    }

    fn to_result(&self) -> Result<FeasibilityResult, IoError> {
        match (self.status.as_str(), &self.witness) {
            ("EMPTY", None) => Ok(FeasibilityResult::Empty),
            ("NEAR_DEGENERATE", None) => Ok(FeasibilityResult::NearDegenerate),
            ("NONEMPTY", Some(WitnessFile::Point(p))) => Ok(FeasibilityResult::Nonempty(Witness::Point(parse_pair(p)?))),
            ("NONEMPTY", Some(WitnessFile::Direction(d))) => {
                Ok(FeasibilityResult::Nonempty(Witness::Direction(parse_direction(d)?)))
            }
            (s, _) => Err(IoError::Invalid(format!("bad test result {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestsFile {
    #[serde(rename = "openL")]
    pub open_l: TestFile,
    #[serde(rename = "openR")]
    pub open_r: TestFile,
    #[serde(rename = "closedL")]
    pub closed_l: TestFile,
    #[serde(rename = "closedR")]
    pub closed_r: TestFile,
    pub directions: TestFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VerdictWitnessFile {
    Rotation { center: Pair, sense: String },
    Direction { direction: Pair, translation: Pair },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    pub exact: bool,
    pub near_degenerate: bool,
    /// How to read the witness as a motion.
    pub witness_meaning: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub durations_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictFile {
    pub question: String,
    pub status: String,
    pub tests: TestsFile,
    pub witness: Option<VerdictWitnessFile>,
    pub metadata: Metadata,
}

pub fn question_name(q: Question) -> &'static str {
    match q {
        Question::Fix => "FIX",
        Question::AlmostFix => "ALMOST_FIX",
    }
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::NotWeaklyFix => "NOT_WEAKLY_FIX",
        Status::NotAlmostFix => "NOT_ALMOST_FIX",
        Status::Positive => "POSITIVE",
        Status::FirstOrderIndeterminate => "FIRST_ORDER_INDETERMINATE",
    }
}

pub fn sense_name(s: Sense) -> &'static str {
    match s {
        Sense::Cw => "CW",
        Sense::Ccw => "CCW",
    }
}

fn parse_sense(s: &str) -> Result<Sense, IoError> {
    match s {
        "CW" => Ok(Sense::Cw),
        "CCW" => Ok(Sense::Ccw),
        _ => Err(IoError::Invalid(format!("unknown sense {s:?}"))),
    }
}

fn witness_meaning(w: &Option<VerdictWitness>) -> String {
    match w {
        None => "none".into(),
        Some(VerdictWitness::Rotation { sense: Sense::Cw, .. }) => {
            "small rotations about center turning the points clockwise relative to the body (the body turns counterclockwise)".into()
        }
        Some(VerdictWitness::Rotation { sense: Sense::Ccw, .. }) => {
            "small rotations about center turning the points counterclockwise relative to the body (the body turns clockwise)".into()
        }
        Some(VerdictWitness::Direction { .. }) => {
            "rotation centers far out along direction, or a body translation along translation".into()
        }
    }
}

impl VerdictFile {
    pub fn from_verdict(v: &Verdict, precision: &Precision) -> Self {
        let (mode, tolerance) = mode_fields(precision);
        VerdictFile {
            question: question_name(v.question).into(),
            status: status_name(v.status).into(),
            tests: TestsFile {
                open_l: TestFile::from_result(&v.tests.open_left),
                open_r: TestFile::from_result(&v.tests.open_right),
                closed_l: TestFile::from_result(&v.tests.closed_left),
                closed_r: TestFile::from_result(&v.tests.closed_right),
                directions: TestFile::from_result(&v.tests.directions),
            },
            witness: v.witness.as_ref().map(|w| match w {
                VerdictWitness::Rotation { center, sense } => {
                    VerdictWitnessFile::Rotation { center: pair(center), sense: sense_name(*sense).into() }
                }
                VerdictWitness::Direction { direction, translation } => VerdictWitnessFile::Direction {
                    direction: pair(direction.vec()),
                    translation: pair(translation.vec()),
                },
            }),
            metadata: Metadata {
                mode,
                tolerance,
                exact: v.exact,
                near_degenerate: v.near_degenerate,
                witness_meaning: witness_meaning(&v.witness),
                durations_ms: None,
            },
        }
    }

    pub fn to_verdict(&self) -> Result<Verdict, IoError> {
        let question = match self.question.as_str() {
            "FIX" => Question::Fix,
            "ALMOST_FIX" => Question::AlmostFix,
            q => return Err(IoError::Invalid(format!("unknown question {q:?}"))),
        };
        let status = match self.status.as_str() {
            "NOT_WEAKLY_FIX" => Status::NotWeaklyFix,
            "NOT_ALMOST_FIX" => Status::NotAlmostFix,
            "POSITIVE" => Status::Positive,
            "FIRST_ORDER_INDETERMINATE" => Status::FirstOrderIndeterminate,
            s => return Err(IoError::Invalid(format!("unknown status {s:?}"))),
        };
        let witness = match &self.witness {
            None => None,
            Some(VerdictWitnessFile::Rotation { center, sense }) => {
                Some(VerdictWitness::Rotation { center: parse_pair(center)?, sense: parse_sense(sense)? })
            }
            Some(VerdictWitnessFile::Direction { direction, translation }) => Some(VerdictWitness::Direction {
                direction: parse_direction(direction)?,
                translation: parse_direction(translation)?,
            }),
        };
        Ok(Verdict {
            question,
            status,
            tests: TestResults {
                open_left: self.tests.open_l.to_result()?,
                open_right: self.tests.open_r.to_result()?,
                closed_left: self.tests.closed_l.to_result()?,
                closed_right: self.tests.closed_r.to_result()?,
                directions: self.tests.directions.to_result()?,
            },
            witness,
            near_degenerate: self.metadata.near_degenerate,
            exact: self.metadata.exact,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilyFile {
    Rotation { center: Pair, sense: String },
    Translation { direction: Pair },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeFile {
    pub family: FamilyFile,
    pub magnitudes: Vec<String>,
    pub penetration_free: Vec<bool>,
    pub candidate_index: usize,
    pub disc_rotations_skipped: bool,
}

impl EscapeFile {
    pub fn from_report(r: &EscapeReport) -> Self {
        EscapeFile {
            family: match &r.family {
                EscapeFamily::Rotation { center, sense } => {
                    FamilyFile::Rotation { center: pair(center), sense: sense_name(*sense).into() }
                }
                EscapeFamily::Translation { direction } => FamilyFile::Translation { direction: pair(direction.vec()) },
            },
            magnitudes: r.magnitudes.iter().map(format_scalar).collect(),
            penetration_free: r.penetration_free.clone(),
            candidate_index: r.candidate_index,
            disc_rotations_skipped: r.disc_rotations_skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFile {
    pub anchor: PointFile,
    pub side: String,
    pub first: PointFile,
    pub second: PointFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementFile {
    pub epsilon: String,
    pub delta: String,
    pub pairs: Vec<PairFile>,
    pub distinct_points: bool,
}

pub fn side_name(s: SideTag) -> &'static str {
    match s {
        SideTag::BothSides => "both_sides",
        SideTag::SameSideLeft => "same_side_left",
        SideTag::SameSideRight => "same_side_right",
    }
}

impl PlacementFile {
    pub fn from_placement(p: &PlacementDescriptor) -> Self {
        PlacementFile {
            epsilon: format_scalar(&p.epsilon),
            delta: format_scalar(&p.delta),
            pairs: p
                .pairs
                .iter()
                .map(|q| PairFile {
                    anchor: PointFile::from_point(&q.anchor),
                    side: side_name(q.side).into(),
                    first: PointFile::from_point(&q.first),
                    second: PointFile::from_point(&q.second),
                })
                .collect(),
            distinct_points: p.distinct_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementFile {
    pub placement: PlacementFile,
    pub points: Vec<PointFile>,
    pub verdict: VerdictFile,
}

impl RefinementFile {
    pub fn from_refinement(r: &Refinement, precision: &Precision) -> Self {
        RefinementFile {
            placement: PlacementFile::from_placement(&r.placement),
            points: points_to_file(&r.placement.points()),
            verdict: VerdictFile::from_verdict(&r.verdict, precision),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn scalar_string(v: &Scalar) -> String {
    format_scalar(v)
}
