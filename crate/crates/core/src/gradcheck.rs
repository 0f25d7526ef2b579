//! Central finite-difference check of every gradient of a problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, FnId, Result};
use crate::problem::{finite_diff_gradient, Problem, Vector};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GradcheckOptions {
    pub samples: usize,
    pub seed: u64,
    /// Finite-difference step.
    pub h: f64,
    /// Largest accepted relative error.
    pub tol: f64,
}

impl Default for GradcheckOptions {
    fn default() -> Self {
        GradcheckOptions { samples: 100, seed: 0, h: 1e-6, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckEntry {
    #[serde(serialize_with = "display")]
    pub function: FnId,
    /// Largest `|g - g_fd| / max(|g|, 1)` over the samples.
    pub max_rel_error: f64,
    /// Sample where the largest error occurred.
    pub worst_point: Vec<f64>,
}

fn display<S: serde::Serializer>(id: &FnId, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(id)
}

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckReport {
    pub problem: String,
    pub options: GradcheckOptions,
    pub entries: Vec<GradcheckEntry>,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.max_rel_error <= self.options.tol)
    }

    pub fn max_error(&self) -> f64 {
        self.entries.iter().map(|e| e.max_rel_error).fold(0.0, f64::max)
    }
}

/// Relative gradient error `|analytic - fd| / max(|analytic|, 1)`.
pub fn relative_error(analytic: &Vector, fd: &Vector) -> f64 {
    (analytic - fd).norm() / analytic.norm().max(1.0)
}

/// Uniform samples from the problem's sample box, reproducible from `seed`.
pub fn sample_points(problem: &Problem, samples: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| Vector::from_iterator(problem.dim(), problem.sample_box().iter().map(|&(lo, hi)| rng.random_range(lo..=hi))))
        .collect()
}

/// Compares every analytic gradient against central differences at sampled points.
///
/// An evaluation failure at a sample is returned as the error.
pub fn gradcheck(problem: &Problem, opts: &GradcheckOptions) -> Result<GradcheckReport> {
    let points = sample_points(problem, opts.samples, opts.seed);
    let mut entries = Vec::new();
    for (id, f) in problem.functions() {
        let mut worst = (0.0, vec![]);
        for u in &points {
            let analytic = problem.eval_gradient(id, u)?;
            problem.eval(id, u)?;
            let fd = finite_diff_gradient(|x| f.value(x), u, opts.h).map_err(|e| match e {
                Error::Evaluation { detail, .. } => Error::Evaluation { function: id, detail },
                other => other,
            })?;
            let err = relative_error(&analytic, &fd);
            if err > worst.0 || worst.1.is_empty() {
                worst = (err, u.iter().copied().collect());
            }
        }
        entries.push(GradcheckEntry { function: id, max_rel_error: worst.0, worst_point: worst.1 });
    }
    Ok(GradcheckReport { problem: problem.name().to_string(), options: *opts, entries })
}
