//! Fix and almost-fix classification from first-order boundary data.
//!
//! Each question is answered by five feasibility tests over the points'
//! sectors. A nonempty open test certifies that the points do not weakly fix
//! (or do not almost fix) the body; empty closed and direction tests certify
//! that they do. Anything in between is reported as first-order indeterminate
//! together with the blocking witness.

use std::collections::HashMap;

use num_traits::Signed;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::body::{BodyError, BoundaryPoint, ConvexBody};
use crate::feasibility::{
    direction_system_empty, sector_system_empty, FeasibilityError, FeasibilityResult, Witness,
};
use crate::geom::{int, pow2_neg, Closure, Direction, Point, Scalar};
use crate::sectors::{DirectionKind, Sector, SectorKind, TangentData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Question {
    Fix,
    AlmostFix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    NotWeaklyFix,
    NotAlmostFix,
    Positive,
    FirstOrderIndeterminate,
}

/// Sense in which the points turn relative to the body. `Cw` means the
/// points follow `R(w, -a)` for small `a > 0`; the body itself turns
/// counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Cw,
    Ccw,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VerdictWitness {
    /// Small rotations of the body about `center` in the given sense keep the
    /// points out of the interior (to first order).
    Rotation { center: Point, sense: Sense },
    /// Direction in every direction set; `translation` is the matching body
    /// displacement (the direction turned a quarter counterclockwise).
    Direction { direction: Direction, translation: Direction },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestResults {
    pub open_left: FeasibilityResult,
    pub open_right: FeasibilityResult,
    pub closed_left: FeasibilityResult,
    pub closed_right: FeasibilityResult,
    pub directions: FeasibilityResult,
}

impl TestResults {
    fn all(&self) -> [&FeasibilityResult; 5] {
        [&self.open_left, &self.open_right, &self.closed_left, &self.closed_right, &self.directions]
    }

    pub fn any_near_degenerate(&self) -> bool {
        self.all().iter().any(|r| matches!(r, FeasibilityResult::NearDegenerate))
    }

    pub fn any_nonempty(&self) -> bool {
        self.all().iter().any(|r| r.is_nonempty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub question: Question,
    pub status: Status,
    pub tests: TestResults,
    pub witness: Option<VerdictWitness>,
    /// Some test could not be decided within the tolerance.
    pub near_degenerate: bool,
    /// Computed with exact predicates.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("no points given")]
    NoPoints,
    #[error("invalid point {index}: {reason}")]
    InvalidPoint { index: usize, reason: String },
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

/// Validated points with duplicates collapsed, and their tangent data.
fn prepare(body: &ConvexBody, pts: &[BoundaryPoint]) -> Result<Vec<(BoundaryPoint, TangentData)>, ClassifyError> {
    if pts.is_empty() {
        return Err(ClassifyError::NoPoints);
    }
    let mut out: Vec<(BoundaryPoint, TangentData)> = Vec::new();
    let mut seen: HashMap<&Point, usize> = HashMap::new();
    for (index, bp) in pts.iter().enumerate() {
        let t = body
            .tangents_at(bp)
            .map_err(|e| ClassifyError::InvalidPoint { index, reason: e.to_string() })?;
        if let Some(&j) = seen.get(&bp.coords) {
            let other = &pts[j];
            if other.element == bp.element && other.param == bp.param {
                continue;
            }
            return Err(ClassifyError::InvalidPoint {
                index,
                reason: format!("same location as point {j} with a different address"),
            });
        }
        seen.insert(&bp.coords, index);
        out.push((bp.clone(), t));
    }
    Ok(out)
}

fn sectors(pts: &[(BoundaryPoint, TangentData)], kind: SectorKind, closure: Closure) -> Vec<Sector> {
    pts.iter().map(|(bp, t)| Sector::new(kind, closure, &bp.coords, t)).collect()
}

fn rotation_witness(r: &FeasibilityResult, sense: Sense) -> Option<VerdictWitness> {
    match r.witness() {
        Some(Witness::Point(p)) => Some(VerdictWitness::Rotation { center: p.clone(), sense }),
        _ => None,
    }
}

fn direction_witness(r: &FeasibilityResult) -> Option<VerdictWitness> {
    match r.witness() {
        Some(Witness::Direction(d)) => {
            Some(VerdictWitness::Direction { direction: d.clone(), translation: d.rot90() })
        }
        _ => None,
    }
}

/// Sector and direction kinds a question tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorKindPair {
    pub left: SectorKind,
    pub right: SectorKind,
    pub directions: DirectionKind,
}

impl SectorKindPair {
    pub fn for_question(q: Question) -> Self {
        match q {
            Question::Fix => SectorKindPair { left: SectorKind::L, right: SectorKind::R, directions: DirectionKind::VecL },
            Question::AlmostFix => SectorKindPair {
                left: SectorKind::SmallL,
                right: SectorKind::SmallR,
                directions: DirectionKind::VecSmallL,
            },
        }
    }
}

/// Runs the five tests for `question` and assembles the verdict.
pub fn classify(body: &ConvexBody, pts: &[BoundaryPoint], question: Question) -> Result<Verdict, ClassifyError> {
    let pts = prepare(body, pts)?;
    let precision = body.precision();
    let SectorKindPair { left, right, directions: dirs } = SectorKindPair::for_question(question);
    let run = |kind, closure| sector_system_empty(&sectors(&pts, kind, closure), precision);
    let tangents: Vec<TangentData> = pts.iter().map(|(_, t)| t.clone()).collect();
    let tests = TestResults {
        open_left: run(left, Closure::Open)?,
        open_right: run(right, Closure::Open)?,
        closed_left: run(left, Closure::Closed)?,
        closed_right: run(right, Closure::Closed)?,
        directions: direction_system_empty(&tangents, dirs, precision),
    };

    let (status, witness) = if tests.open_left.is_nonempty() || tests.open_right.is_nonempty() {
        let status = match question {
            Question::Fix => Status::NotWeaklyFix,
            Question::AlmostFix => Status::NotAlmostFix,
        };
        let w = rotation_witness(&tests.open_left, Sense::Cw)
            .or_else(|| rotation_witness(&tests.open_right, Sense::Ccw));
        (status, w)
    } else if tests.closed_left.is_empty() && tests.closed_right.is_empty() && tests.directions.is_empty() {
        (Status::Positive, None)
    } else {
        let w = rotation_witness(&tests.closed_left, Sense::Cw)
            .or_else(|| rotation_witness(&tests.closed_right, Sense::Ccw))
            .or_else(|| direction_witness(&tests.directions));
        (Status::FirstOrderIndeterminate, w)
    };
    Ok(Verdict {
        question,
        status,
        near_degenerate: tests.any_near_degenerate(),
        tests,
        witness,
        exact: precision.is_exact(),
    })
}

pub fn classify_fix(body: &ConvexBody, pts: &[BoundaryPoint]) -> Result<Verdict, ClassifyError> {
    classify(body, pts, Question::Fix)
}

pub fn classify_almost_fix(body: &ConvexBody, pts: &[BoundaryPoint]) -> Result<Verdict, ClassifyError> {
    classify(body, pts, Question::AlmostFix)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideTag {
    /// Offsets `-d` and `+d`.
    BothSides,
    /// Offsets `-2d` and `-d`.
    SameSideLeft,
    /// Offsets `+d` and `+2d`.
    SameSideRight,
}

impl SideTag {
    pub const ALL: [SideTag; 3] = [SideTag::BothSides, SideTag::SameSideLeft, SideTag::SameSideRight];

    fn offsets(self, delta: &Scalar) -> (Scalar, Scalar) {
        let two = delta * int(2);
        match self {
            SideTag::BothSides => (-delta.clone(), delta.clone()),
            SideTag::SameSideLeft => (-two, -delta.clone()),
            SideTag::SameSideRight => (delta.clone(), two),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefinePolicy {
    BothSidesFirst,
    AllPlacements,
}

pub const DEFAULT_REFINE_STEPS: u32 = 20;
/// Above this many points only uniform placements are tried.
pub const MAX_MIXED_PLACEMENT_POINTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlacementPair {
    pub anchor: BoundaryPoint,
    pub side: SideTag,
    pub first: BoundaryPoint,
    pub second: BoundaryPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlacementDescriptor {
    pub epsilon: Scalar,
    pub delta: Scalar,
    pub pairs: Vec<PlacementPair>,
    /// Refined points are always distinct from their anchor and from each other.
    pub distinct_points: bool,
}

impl PlacementDescriptor {
    /// The `2n` refined points, pair by pair.
    pub fn points(&self) -> Vec<BoundaryPoint> {
        self.pairs.iter().flat_map(|p| [p.first.clone(), p.second.clone()]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub placement: PlacementDescriptor,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("the points are not certified to almost fix the body (status {0:?})")]
    NotAlmostPositive(Status),
    #[error("no placement within {steps} halvings of epsilon fixes the body")]
    RefinementExhausted { steps: u32 },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Body(#[from] BodyError),
}

fn all_tag_vectors(n: usize) -> Vec<Vec<SideTag>> {
    if n > MAX_MIXED_PLACEMENT_POINTS {
        return SideTag::ALL.iter().map(|&t| vec![t; n]).collect();
    }
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                SideTag::ALL.iter().map(move |&t| {
                    let mut w = v.clone();
                    w.push(t);
                    w
                })
            })
            .collect();
    }
    out
}

/// Candidate `(delta, tags)` in search order.
fn placement_order(n: usize, epsilon: &Scalar, steps: u32, policy: RefinePolicy) -> Vec<(Scalar, Vec<SideTag>)> {
    let deltas: Vec<Scalar> = (1..=steps).map(|k| epsilon * pow2_neg(k)).collect();
    let tags = all_tag_vectors(n);
    let mut out = Vec::new();
    match policy {
        RefinePolicy::BothSidesFirst => {
            for d in &deltas {
                out.push((d.clone(), vec![SideTag::BothSides; n]));
            }
            for d in &deltas {
                for t in tags.iter().filter(|t| t.iter().any(|&s| s != SideTag::BothSides)) {
                    out.push((d.clone(), t.clone()));
                }
            }
        }
        RefinePolicy::AllPlacements => {
            for d in &deltas {
                for t in &tags {
                    out.push((d.clone(), t.clone()));
                }
            }
        }
    }
    out
}

fn build_placement(
    body: &ConvexBody,
    anchors: &[BoundaryPoint],
    epsilon: &Scalar,
    delta: &Scalar,
    tags: &[SideTag],
) -> Result<Option<PlacementDescriptor>, BodyError> {
    let mut pairs = Vec::with_capacity(anchors.len());
    for (a, &side) in anchors.iter().zip(tags) {
        let (s1, s2) = side.offsets(delta);
        let first = body.offset_along_boundary(a, &s1)?;
        let second = body.offset_along_boundary(a, &s2)?;
        pairs.push(PlacementPair { anchor: a.clone(), side, first, second });
    }
    let placement =
        PlacementDescriptor { epsilon: epsilon.clone(), delta: delta.clone(), pairs, distinct_points: true };
    let pts = placement.points();
    let mut coords: Vec<&Point> = pts.iter().map(|p| &p.coords).collect();
    coords.extend(anchors.iter().map(|a| &a.coords));
    let total = coords.len();
    coords.sort_by(|a, b| a.x.cmp(&b.x).then(a.y.cmp(&b.y)));
    coords.dedup();
    Ok((coords.len() == total).then_some(placement))
}

/// Replaces every point by a nearby pair and returns the first placement,
/// in policy order, whose `2n` points are certified to fix the body.
pub fn refine_almost_to_fix(
    body: &ConvexBody,
    pts: &[BoundaryPoint],
    epsilon: &Scalar,
    policy: RefinePolicy,
) -> Result<Refinement, RefineError> {
    refine_with_steps(body, pts, epsilon, policy, DEFAULT_REFINE_STEPS)
}

pub fn refine_with_steps(
    body: &ConvexBody,
    pts: &[BoundaryPoint],
    epsilon: &Scalar,
    policy: RefinePolicy,
    steps: u32,
) -> Result<Refinement, RefineError> {
    if !epsilon.is_positive() {
        return Err(RefineError::NonPositiveEpsilon);
    }
    let almost = classify_almost_fix(body, pts)?;
    if almost.status != Status::Positive {
        return Err(RefineError::NotAlmostPositive(almost.status));
    }
    let anchors: Vec<BoundaryPoint> = prepare(body, pts)?.into_iter().map(|(bp, _)| bp).collect();
    for (delta, tags) in placement_order(anchors.len(), epsilon, steps, policy) {
        let Some(placement) = build_placement(body, &anchors, epsilon, &delta, &tags)? else { continue };
        let verdict = classify_fix(body, &placement.points())?;
        if verdict.status == Status::Positive {
            return Ok(Refinement { placement, verdict });
        }
    }
    Err(RefineError::RefinementExhausted { steps })
}

/// FIX verdicts for every candidate placement over the first `steps`
/// halvings of `epsilon`, without requiring an almost-fix certificate first.
pub fn survey_placements(
    body: &ConvexBody,
    pts: &[BoundaryPoint],
    epsilon: &Scalar,
    policy: RefinePolicy,
    steps: u32,
) -> Result<Vec<Refinement>, RefineError> {
    if !epsilon.is_positive() {
        return Err(RefineError::NonPositiveEpsilon);
    }
    let anchors: Vec<BoundaryPoint> = prepare(body, pts)?.into_iter().map(|(bp, _)| bp).collect();
    let order = placement_order(anchors.len(), epsilon, steps, policy);
    order
        .par_iter()
        .map(|(delta, tags)| -> Result<Option<Refinement>, RefineError> {
            let Some(placement) = build_placement(body, &anchors, epsilon, delta, tags)? else { return Ok(None) };
            let verdict = classify_fix(body, &placement.points())?;
            Ok(Some(Refinement { placement, verdict }))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|v| v.into_iter().flatten().collect())
}

pub const MAX_SEARCH_RESOLUTION: u32 = 64;
/// Above this many tuples a seeded sample of this size is classified.
pub const SEARCH_TUPLE_CAP: usize = 20_000;

/// Grid of boundary points: parameters `j / (resolution + 1)` on every element.
pub fn boundary_grid(body: &ConvexBody, resolution: u32) -> Result<Vec<BoundaryPoint>, BodyError> {
    let r = resolution.min(MAX_SEARCH_RESOLUTION) as i64;
    let mut out = Vec::new();
    for e in 0..body.len() {
        for j in 0..=r {
            out.push(body.point_at(e, Scalar::new(j.into(), (r + 1).into()))?);
        }
    }
    Ok(out)
}

fn combinations(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 || n > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        out.push(idx.clone());
        let mut i = n;
        while i > 0 && idx[i - 1] == m - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Whether a verdict is reported by the almost-fixing search: certified, or
/// undecided only because of the tolerance.
fn search_hit(v: &Verdict) -> bool {
    v.status == Status::Positive
        || (v.status == Status::FirstOrderIndeterminate && v.near_degenerate && !v.tests.any_nonempty())
}

/// All `n`-tuples of `candidates` (in lexicographic index order) whose
/// almost-fix verdict is positive or undecided only within the tolerance.
/// When there are more than [`SEARCH_TUPLE_CAP`] tuples, a seeded sample of
/// that size is examined instead.
pub fn search_almost_fixing_among(
    body: &ConvexBody,
    candidates: &[BoundaryPoint],
    n: usize,
    seed: u64,
) -> Result<Vec<(Vec<BoundaryPoint>, Verdict)>, ClassifyError> {
    let mut tuples = combinations(candidates.len(), n);
    if tuples.len() > SEARCH_TUPLE_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep = sample(&mut rng, tuples.len(), SEARCH_TUPLE_CAP).into_vec();
        keep.sort_unstable();
        tuples = keep.into_iter().map(|i| tuples[i].clone()).collect();
    }
    let results: Vec<Option<(Vec<BoundaryPoint>, Verdict)>> = tuples
        .par_iter()
        .map(|t| {
            let pts: Vec<BoundaryPoint> = t.iter().map(|&i| candidates[i].clone()).collect();
            let v = classify_almost_fix(body, &pts)?;
            Ok(search_hit(&v).then_some((pts, v)))
        })
        .collect::<Result<_, ClassifyError>>()?;
    Ok(results.into_iter().flatten().collect())
}

/// Almost-fixing `n`-tuples on the boundary grid of the given resolution.
pub fn search_almost_fixing(
    body: &ConvexBody,
    n: usize,
    resolution: u32,
    seed: u64,
) -> Result<Vec<(Vec<BoundaryPoint>, Verdict)>, ClassifyError> {
    let grid = boundary_grid(body, resolution)
        .map_err(|e| ClassifyError::InvalidPoint { index: 0, reason: e.to_string() })?;
    search_almost_fixing_among(body, &grid, n, seed)
}
