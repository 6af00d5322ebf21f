//! Randomized cross-checks between the classifiers and the motion oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::body::{BoundaryPoint, ConvexBody};
use crate::classify::{classify_almost_fix, classify_fix, Status, Verdict, VerdictWitness};
use crate::fixtures::random_convex_polygon;
use crate::geom::{format_scalar, Point, Scalar};
use crate::io::status_name;
use crate::oracle::{
    default_rotation_schedule, default_translation_schedule, escape_search, scaled_rotation_schedule,
    validate_rotation_witness, validate_translation_witness, EscapeConfig,
};

pub const MAX_TRIALS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: usize,
    pub min_vertices: u32,
    pub max_vertices: u32,
    pub min_points: usize,
    pub max_points: usize,
    pub escape_samples: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 1,
            trials: 100,
            min_vertices: 4,
            max_vertices: 10,
            min_points: 2,
            max_points: 5,
            escape_samples: EscapeConfig::default().samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub invariant: String,
    pub vertices: Vec<[String; 2]>,
    pub points: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub not_weakly_fix: usize,
    pub not_almost_fix: usize,
    pub positive: usize,
    pub indeterminate: usize,
}

impl StatusCounts {
    fn add(&mut self, s: Status) {
        match s {
            Status::NotWeaklyFix => self.not_weakly_fix += 1,
            Status::NotAlmostFix => self.not_almost_fix += 1,
            Status::Positive => self.positive += 1,
            Status::FirstOrderIndeterminate => self.indeterminate += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub trials: usize,
    pub fix: StatusCounts,
    pub almost_fix: StatusCounts,
    pub witnesses_validated: usize,
    pub escape_searches: usize,
    pub violations: Vec<Violation>,
}

struct Trial {
    fix: Status,
    almost: Status,
    validated: usize,
    searched: bool,
    violations: Vec<String>,
    body: ConvexBody,
    points: Vec<Point>,
}

fn random_points(rng: &mut ChaCha8Rng, body: &ConvexBody, count: usize) -> Vec<BoundaryPoint> {
    (0..count)
        .map(|_| {
            let e = rng.gen_range(0..body.len());
            let param = if rng.gen_range(0..3) == 0 {
                Scalar::from_integer(0.into())
            } else {
                Scalar::new(rng.gen_range(1..16i64).into(), 16.into())
            };
            body.point_at(e, param).expect("valid address")
        })
        .collect()
}

fn witness_validates(body: &ConvexBody, pts: &[Point], v: &Verdict) -> Option<bool> {
    match &v.witness {
        Some(VerdictWitness::Rotation { center, sense }) => {
            let schedule = scaled_rotation_schedule(body, pts, center, *sense, &default_rotation_schedule());
            validate_rotation_witness(body, pts, center, *sense, &schedule).ok()
        }
        Some(VerdictWitness::Direction { translation, .. }) => {
            validate_translation_witness(body, pts, translation, &default_translation_schedule()).ok()
        }
        None => None,
    }
}

fn run_trial(cfg: &FuzzConfig, index: usize) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let k = rng.gen_range(cfg.min_vertices..=cfg.max_vertices);
    let body = random_convex_polygon(rng.gen(), k).expect("random polygon");
    let count = rng.gen_range(cfg.min_points..=cfg.max_points);
    let bps = random_points(&mut rng, &body, count);
    let points: Vec<Point> = bps.iter().map(|b| b.coords.clone()).collect();
    let fix = classify_fix(&body, &bps).expect("classifiable");
    let almost = classify_almost_fix(&body, &bps).expect("classifiable");
    let mut violations = Vec::new();
    let mut validated = 0;

    if fix.status == Status::Positive && almost.status != Status::Positive {
        violations.push("FIX positive but ALMOST_FIX not positive".to_string());
    }
    if almost.status == Status::NotAlmostFix && fix.status != Status::NotWeaklyFix {
        violations.push("NOT_ALMOST_FIX without NOT_WEAKLY_FIX".to_string());
    }
    for v in [&fix, &almost] {
        if matches!(v.status, Status::NotWeaklyFix | Status::NotAlmostFix) {
            match witness_validates(&body, &points, v) {
                Some(true) => validated += 1,
                _ => violations.push(format!("{} witness does not validate", status_name(v.status))),
            }
        }
    }
    let searched = fix.status == Status::Positive;
    if searched {
        let cfg = EscapeConfig { radius: None, samples: cfg.escape_samples, seed: cfg.seed ^ index as u64 };
        if let Some(r) = escape_search(&body, &points, &cfg) {
            violations.push(format!("escape {:?} coexists with FIX positive", r.family));
        }
    }
    Trial { fix: fix.status, almost: almost.status, validated, searched, violations, body, points }
}

/// Runs `trials` random polygons with random boundary points through both
/// classifiers and the oracle, collecting invariant violations.
pub fn run_fuzz(cfg: &FuzzConfig) -> FuzzSummary {
    let trials = cfg.trials.min(MAX_TRIALS);
    let results: Vec<Trial> = (0..trials).into_par_iter().map(|i| run_trial(cfg, i)).collect();
    let mut summary = FuzzSummary {
        seed: cfg.seed,
        trials,
        fix: StatusCounts::default(),
        almost_fix: StatusCounts::default(),
        witnesses_validated: 0,
        escape_searches: 0,
        violations: Vec::new(),
    };
    let pair = |p: &Point| [format_scalar(&p.x), format_scalar(&p.y)];
    for (i, t) in results.into_iter().enumerate() {
        summary.fix.add(t.fix);
        summary.almost_fix.add(t.almost);
        summary.witnesses_validated += t.validated;
        summary.escape_searches += t.searched as usize;
        for invariant in t.violations {
            summary.violations.push(Violation {
                trial: i,
                invariant,
                vertices: t.body.vertices().iter().map(pair).collect(),
                points: t.points.iter().map(pair).collect(),
            });
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_clean_and_deterministic() {
        let cfg = FuzzConfig { trials: 30, escape_samples: 500, ..FuzzConfig::default() };
        let a = run_fuzz(&cfg);
        assert!(a.violations.is_empty(), "{:?}", a.violations);
        assert_eq!(a, run_fuzz(&cfg));
        let total = a.fix.not_weakly_fix + a.fix.positive + a.fix.indeterminate;
        assert_eq!(total, 30);
    }

    #[test]
    fn zero_trials() {
        let s = run_fuzz(&FuzzConfig { trials: 0, ..FuzzConfig::default() });
        assert_eq!(s.trials, 0);
        assert!(s.violations.is_empty());
    }
}
