//! Python bindings. Bodies are wrapped in [`Body`]; points are sequences of
//! `(x, y)` pairs whose coordinates may be `int`, `float` or rational strings
//! such as `"3/7"`. Results come back as the same JSON documents the command
//! line tool writes.

use immobilize2d::body::{ConvexBody, Location};
use immobilize2d::classify::{classify as classify_points, refine_with_steps, Question, RefinePolicy, DEFAULT_REFINE_STEPS};
use immobilize2d::consistency::{run_fuzz, FuzzConfig, MAX_TRIALS};
use immobilize2d::fixtures;
use immobilize2d::geom::{parse_scalar, scalar_from_f64, Point, Precision, Scalar};
use immobilize2d::io::{pair, to_json, BodyFile, EscapeFile, RefinementFile, VerdictFile};
use immobilize2d::oracle::{escape_search, EscapeConfig, MAX_ESCAPE_SAMPLES};
use immobilize2d::render::render_svg;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[derive(FromPyObject)]
enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn scalar(&self) -> PyResult<Scalar> {
        match self {
            Num::Int(v) => Ok(Scalar::from_integer((*v).into())),
            Num::Float(v) if v.is_finite() => Ok(scalar_from_f64(*v)),
            Num::Float(v) => Err(value_error(format!("non-finite coordinate {v}"))),
            Num::Text(s) => parse_scalar(s).map_err(value_error),
        }
    }
}

type Coords = Vec<Num>;

fn point(p: &Coords) -> PyResult<Point> {
    match &p[..] {
        [x, y] => Ok(Point::new(x.scalar()?, y.scalar()?)),
        _ => Err(value_error(format!("expected an (x, y) pair, got {} values", p.len()))),
    }
}

fn boundary_points(body: &ConvexBody, pts: &[Coords]) -> PyResult<Vec<immobilize2d::body::BoundaryPoint>> {
    pts.iter()
        .enumerate()
        .map(|(i, p)| body.locate(&point(p)?).map_err(|e| value_error(format!("point {i}: {e}"))))
        .collect()
}

fn positive(v: &Num, what: &str) -> PyResult<Scalar> {
    let s = v.scalar()?;
    if s <= Scalar::from_integer(0.into()) {
        return Err(value_error(format!("{what} must be positive")));
    }
    Ok(s)
}

/// A planar convex body bounded by segments and circular arcs.
#[pyclass(frozen, module = "immobilize2d_py")]
struct Body {
    inner: ConvexBody,
}

#[pymethods]
impl Body {
    /// Parses a body JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: BodyFile = serde_json::from_str(text).map_err(value_error)?;
        Ok(Body { inner: file.to_body(None).map_err(value_error)? })
    }

    /// Polygon from counterclockwise vertices, exact unless `tol` is given.
    #[staticmethod]
    #[pyo3(signature = (vertices, tol=None))]
    fn polygon(vertices: Vec<Coords>, tol: Option<Num>) -> PyResult<Self> {
        let vs = vertices.iter().map(point).collect::<PyResult<Vec<_>>>()?;
        let precision = match tol {
            Some(t) => Precision::Tolerant { tau: positive(&t, "tol")? },
            None => Precision::Exact,
        };
        Ok(Body { inner: ConvexBody::polygon_with(&vs, precision).map_err(value_error)? })
    }

    /// Built-in fixture by name, with its points as rational string pairs.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<(Self, Vec<[String; 2]>)> {
        let (body, pts) = fixtures::by_name(name).map_err(value_error)?;
        Ok((Body { inner: body }, pts.iter().map(|p| pair(&p.coords)).collect()))
    }

    #[staticmethod]
    fn fixture_names() -> Vec<&'static str> {
        fixtures::FIXTURE_NAMES.to_vec()
    }

    fn to_json(&self) -> String {
        to_json(&BodyFile::from_body(&self.inner))
    }

    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    /// `"interior"`, `"boundary"` or `"exterior"`.
    fn contains(&self, p: Coords) -> PyResult<&'static str> {
        match self.inner.contains(&point(&p)?) {
            Ok(Location::Interior) => Ok("interior"),
            Ok(Location::Boundary) => Ok("boundary"),
            Ok(Location::Exterior) => Ok("exterior"),
            Err(e) => Err(value_error(e)),
        }
    }

    /// Boundary address `(element, param)` of a point on the boundary.
    fn locate(&self, p: Coords) -> PyResult<(usize, String)> {
        let bp = self.inner.locate(&point(&p)?).map_err(value_error)?;
        Ok((bp.element, immobilize2d::geom::format_scalar(&bp.param)))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        let kind = if self.inner.is_polygon() { "polygon" } else { "curved" };
        format!("Body({kind}, {} elements)", self.inner.len())
    }
}

/// Verdict JSON for `mode` `"fix"` or `"almost"`.
#[pyfunction]
#[pyo3(signature = (body, points, mode="fix"))]
fn classify(body: &Body, points: Vec<Coords>, mode: &str) -> PyResult<String> {
    let question = match mode {
        "fix" => Question::Fix,
        "almost" => Question::AlmostFix,
        _ => return Err(value_error(format!("unknown mode {mode:?}"))),
    };
    let pts = boundary_points(&body.inner, &points)?;
    let v = classify_points(&body.inner, &pts, question).map_err(value_error)?;
    Ok(to_json(&VerdictFile::from_verdict(&v, body.inner.precision())))
}

/// Refinement JSON for a placement within `epsilon` that fixes the body.
#[pyfunction]
#[pyo3(signature = (body, points, epsilon, policy="both-sides-first", steps=DEFAULT_REFINE_STEPS))]
fn refine(body: &Body, points: Vec<Coords>, epsilon: Num, policy: &str, steps: u32) -> PyResult<String> {
    let policy = match policy {
        "both-sides-first" => RefinePolicy::BothSidesFirst,
        "all" => RefinePolicy::AllPlacements,
        _ => return Err(value_error(format!("unknown policy {policy:?}"))),
    };
    let epsilon = positive(&epsilon, "epsilon")?;
    let pts = boundary_points(&body.inner, &points)?;
    let r = refine_with_steps(&body.inner, &pts, &epsilon, policy, steps).map_err(value_error)?;
    Ok(to_json(&RefinementFile::from_refinement(&r, body.inner.precision())))
}

/// Escape report JSON, or `None` when the search finds nothing.
#[pyfunction]
#[pyo3(signature = (body, points, samples=10_000, seed=0, radius=None))]
fn escape(body: &Body, points: Vec<Coords>, samples: usize, seed: u64, radius: Option<Num>) -> PyResult<Option<String>> {
    if samples > MAX_ESCAPE_SAMPLES {
        return Err(value_error(format!("samples exceeds {MAX_ESCAPE_SAMPLES}")));
    }
    let radius = radius.map(|r| positive(&r, "radius")).transpose()?;
    let coords = points.iter().map(point).collect::<PyResult<Vec<_>>>()?;
    let cfg = EscapeConfig { radius, samples, seed };
    Ok(escape_search(&body.inner, &coords, &cfg).map(|r| to_json(&EscapeFile::from_report(&r))))
}

/// Fuzz summary JSON.
#[pyfunction]
#[pyo3(signature = (seed=1, trials=100, max_points=5, escape_samples=10_000))]
fn fuzz(py: Python<'_>, seed: u64, trials: usize, max_points: usize, escape_samples: usize) -> PyResult<String> {
    let defaults = FuzzConfig::default();
    if trials > MAX_TRIALS {
        return Err(value_error(format!("trials exceeds {MAX_TRIALS}")));
    }
    if max_points < defaults.min_points {
        return Err(value_error(format!("max_points must be at least {}", defaults.min_points)));
    }
    let cfg = FuzzConfig { seed, trials, max_points, escape_samples, ..defaults };
    Ok(py.detach(|| to_json(&run_fuzz(&cfg))))
}

/// SVG drawing of the body and points, with an optional verdict JSON overlay.
#[pyfunction]
#[pyo3(signature = (body, points, verdict=None, window=None))]
fn render(body: &Body, points: Vec<Coords>, verdict: Option<&str>, window: Option<(f64, f64, f64, f64)>) -> PyResult<String> {
    let pts = boundary_points(&body.inner, &points)?;
    let verdict = match verdict {
        Some(text) => {
            let file: VerdictFile = serde_json::from_str(text).map_err(value_error)?;
            Some(file.to_verdict().map_err(value_error)?)
        }
        None => None,
    };
    if let Some((x0, y0, x1, y1)) = window {
        if !(x0 < x1 && y0 < y1) {
            return Err(value_error("window needs x0 < x1 and y0 < y1"));
        }
    }
    Ok(render_svg(&body.inner, &pts, verdict.as_ref(), window))
}

#[pymodule]
fn immobilize2d_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Body>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(refine, m)?)?;
    m.add_function(wrap_pyfunction!(escape, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    Ok(())
}
