use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use immobilize2d::body::{BoundaryPoint, ConvexBody};
use immobilize2d::classify::{
    classify, refine_with_steps, survey_placements, Question, RefineError, RefinePolicy, Status,
    DEFAULT_REFINE_STEPS,
};
use immobilize2d::consistency::{run_fuzz, FuzzConfig, MAX_TRIALS};
use immobilize2d::fixtures;
use immobilize2d::geom::{parse_scalar, Precision, Scalar};
use immobilize2d::io::{
    points_from_file, points_to_file, to_json, BodyFile, EscapeFile, PointFile, RefinementFile, VerdictFile,
};
use immobilize2d::oracle::{escape_search, EscapeConfig, MAX_ESCAPE_SAMPLES};
use immobilize2d::render::{render_svg, Window};

const EXIT_ERROR: u8 = 1;
const EXIT_NOT: u8 = 10;
const EXIT_NOT_ALMOST_POSITIVE: u8 = 11;
const EXIT_REFINEMENT_EXHAUSTED: u8 = 12;
const EXIT_VIOLATIONS: u8 = 13;
const EXIT_INDETERMINATE: u8 = 20;

#[derive(Parser)]
#[command(name = "immobilize2d", version, about = "Fix, weak fix and almost fix decisions for points on a planar convex body")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fix,
    Almost,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    BothSidesFirst,
    All,
}

#[derive(clap::Args)]
struct Inputs {
    /// Body JSON file.
    #[arg(long)]
    body: PathBuf,
    /// Points JSON file.
    #[arg(long)]
    points: PathBuf,
    /// Evaluate predicates exactly, overriding the body file.
    #[arg(long, conflicts_with = "tol")]
    exact: bool,
    /// Evaluate predicates with tolerance `tau`, overriding the body file.
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the points with the first-order tests.
    Classify {
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record the wall-clock duration in the metadata.
        #[arg(long)]
        timings: bool,
    },
    /// Replace every point by a nearby pair so that the pairs fix the body.
    Refine {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        epsilon: String,
        #[arg(long, value_enum, default_value = "both-sides-first")]
        policy: Policy,
        #[arg(long, default_value_t = DEFAULT_REFINE_STEPS)]
        steps: u32,
        /// Report the FIX verdict of every placement instead of the first success.
        #[arg(long)]
        survey: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a small rigid motion that keeps every point out of the interior.
    Escape {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        radius: Option<String>,
        #[arg(long, default_value_t = EscapeConfig::default().samples)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check classifiers and oracle on random polygons.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        max_points: usize,
        #[arg(long, default_value_t = EscapeConfig::default().samples)]
        escape_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the body, points, normals and witness as SVG.
    Render {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        verdict: Option<PathBuf>,
        #[arg(long)]
        svg: PathBuf,
        /// `x0,y0,x1,y1` in body coordinates.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Write a built-in fixture as body and points files.
    Fixture {
        /// One of remark, opposite-corners, straddle, midpoints, square, disc,
        /// e1-N, e2-N, regular-K, random-SEED-K.
        name: String,
        #[arg(long)]
        body_out: PathBuf,
        #[arg(long)]
        points_out: PathBuf,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(inputs: &Inputs) -> Result<(ConvexBody, Vec<BoundaryPoint>)> {
    let precision = if inputs.exact {
        Some(Precision::Exact)
    } else if let Some(t) = &inputs.tol {
        let tau = parse_scalar(t).map_err(|e| anyhow!("--tol: {e}"))?;
        Some(Precision::Tolerant { tau })
    } else {
        None
    };
    let file: BodyFile = read_json(&inputs.body)?;
    let body = file.to_body(precision).with_context(|| format!("body {}", inputs.body.display()))?;
    let pts: Vec<PointFile> = read_json(&inputs.points)?;
    let pts = points_from_file(&body, &pts).with_context(|| format!("points {}", inputs.points.display()))?;
    Ok((body, pts))
}

fn positive_scalar(s: &str, what: &str) -> Result<Scalar> {
    let v = parse_scalar(s).map_err(|e| anyhow!("{what}: {e}"))?;
    if v <= Scalar::from_integer(0.into()) {
        bail!("{what} must be positive");
    }
    Ok(v)
}

fn exit_for(status: Status) -> u8 {
    match status {
        Status::Positive => 0,
        Status::NotWeaklyFix | Status::NotAlmostFix => EXIT_NOT,
        Status::FirstOrderIndeterminate => EXIT_INDETERMINATE,
    }
}

fn parse_window(s: &str) -> Result<Window> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .context("--window expects x0,y0,x1,y1")?;
    match v[..] {
        [x0, y0, x1, y1] if x0 < x1 && y0 < y1 => Ok((x0, y0, x1, y1)),
        _ => bail!("--window expects x0,y0,x1,y1 with x0 < x1 and y0 < y1"),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify { mode, inputs, out, timings } => {
            let (body, pts) = load(&inputs)?;
            let question = match mode {
                Mode::Fix => Question::Fix,
                Mode::Almost => Question::AlmostFix,
            };
            let start = Instant::now();
            let verdict = classify(&body, &pts, question)?;
            let mut file = VerdictFile::from_verdict(&verdict, body.precision());
            if timings {
                file.metadata.durations_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            emit(out.as_deref(), &to_json(&file))?;
            Ok(exit_for(verdict.status))
        }
        Command::Refine { inputs, epsilon, policy, steps, survey, out } => {
            let (body, pts) = load(&inputs)?;
            let epsilon = positive_scalar(&epsilon, "--epsilon")?;
            let policy = match policy {
                Policy::BothSidesFirst => RefinePolicy::BothSidesFirst,
                Policy::All => RefinePolicy::AllPlacements,
            };
            if survey {
                let all = survey_placements(&body, &pts, &epsilon, policy, steps)?;
                let files: Vec<RefinementFile> =
                    all.iter().map(|r| RefinementFile::from_refinement(r, body.precision())).collect();
                emit(out.as_deref(), &to_json(&files))?;
                return Ok(0);
            }
            match refine_with_steps(&body, &pts, &epsilon, policy, steps) {
                Ok(r) => {
                    emit(out.as_deref(), &to_json(&RefinementFile::from_refinement(&r, body.precision())))?;
                    Ok(0)
                }
                Err(e @ RefineError::NotAlmostPositive(_)) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_NOT_ALMOST_POSITIVE)
                }
                Err(e @ RefineError::RefinementExhausted { .. }) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_REFINEMENT_EXHAUSTED)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Escape { inputs, radius, samples, seed, out } => {
            let (body, pts) = load(&inputs)?;
            if samples > MAX_ESCAPE_SAMPLES {
                bail!("--samples exceeds {MAX_ESCAPE_SAMPLES}");
            }
            let radius = radius.map(|r| positive_scalar(&r, "--radius")).transpose()?;
            let coords: Vec<_> = pts.into_iter().map(|p| p.coords).collect();
            let text = match escape_search(&body, &coords, &EscapeConfig { radius, samples, seed }) {
                Some(r) => to_json(&EscapeFile::from_report(&r)),
                None => "none\n".to_string(),
            };
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Fuzz { seed, trials, max_points, escape_samples, out } => {
            if trials > MAX_TRIALS {
                bail!("--trials exceeds {MAX_TRIALS}");
            }
            let defaults = FuzzConfig::default();
            if max_points < defaults.min_points {
                bail!("--max-points must be at least {}", defaults.min_points);
            }
            let cfg = FuzzConfig { seed, trials, max_points, escape_samples, ..defaults };
            let summary = run_fuzz(&cfg);
            emit(out.as_deref(), &to_json(&summary))?;
            Ok(if summary.violations.is_empty() { 0 } else { EXIT_VIOLATIONS })
        }
        Command::Render { inputs, verdict, svg, window } => {
            let (body, pts) = load(&inputs)?;
            let verdict = match verdict {
                Some(p) => Some(read_json::<VerdictFile>(&p)?.to_verdict()?),
                None => None,
            };
            let window = window.as_deref().map(parse_window).transpose()?;
            let text = render_svg(&body, &pts, verdict.as_ref(), window);
            std::fs::write(&svg, text).with_context(|| format!("writing {}", svg.display()))?;
            Ok(0)
        }
        Command::Fixture { name, body_out, points_out } => {
            let (body, pts) = fixtures::by_name(&name)?;
            emit(Some(&body_out), &to_json(&BodyFile::from_body(&body)))?;
            emit(Some(&points_out), &to_json(&points_to_file(&pts)))?;
            Ok(0)
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("IMMOBILIZE2D_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
