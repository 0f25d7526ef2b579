#![allow(dead_code)]

use std::path::PathBuf;
use std::time::{Duration, Instant};

use csdm::problems::{builtin, gomez_levy_start};
use csdm::{solve, Problem, SolveReport, SolverConfig, Vector};

pub fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

pub struct Run {
    pub label: String,
    pub problem: Problem,
    pub start: Vector,
    pub report: SolveReport,
    pub elapsed: Duration,
}

/// Benchmark starts: the published ones plus the auxiliary problems.
pub fn benchmark_starts() -> Vec<(&'static str, Vector)> {
    vec![
        ("rosenbrock-cubic", v(&[0.5, 1.5])),
        ("rosenbrock-cubic", v(&[0.0, 0.0])),
        ("rosenbrock-cubic", v(&[0.0, 1.0])),
        ("rosenbrock-disk", v(&[1.0, -1.0])),
        ("rosenbrock-disk", v(&[1.25, 7f64.sqrt() / 4.0])),
        ("mishra-bird", v(&[-5.0, 0.0])),
        ("mishra-bird", v(&[-1.0, -8.0])),
        ("gomez-levy", gomez_levy_start()),
        ("orthant-quadratic", v(&[1.0, 1.0, 1.0])),
        ("circle-mixed", v(&[1.0, 0.0])),
    ]
}

pub fn run(name: &str, start: &Vector) -> Run {
    let problem = builtin(name).unwrap();
    let t0 = Instant::now();
    let report = solve(&problem, start, &SolverConfig::default()).unwrap();
    let elapsed = t0.elapsed();
    let label = format!("{name} from {:?}", start.as_slice());
    Run { label, problem, start: start.clone(), report, elapsed }
}

pub fn benchmark_runs() -> Vec<Run> {
    benchmark_starts().iter().map(|(name, s)| run(name, s)).collect()
}

pub fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// `|a - b| <= tol * max(1, scale)`.
pub fn close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1.0)
}
