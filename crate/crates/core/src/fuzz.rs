//! Seeded random cone-projection instances checked against the enumeration oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::cone::{project_onto_cone, ConeBasis};
use crate::config::ProjectionConfig;
use crate::error::{Error, Result};
use crate::oracle::{oracle_project_subset_enumeration, MAX_ORACLE_EDGES};
use crate::problem::Vector;

/// Largest number of free vectors drawn per instance.
pub const MAX_FREE: usize = 2;

#[derive(Debug, Clone)]
pub struct FuzzInstance {
    pub basis: ConeBasis,
    pub v: Vector,
}

/// Draws `count` instances with `dim <= max_dim` and `edges <= max_edges`,
/// redrawing any whose generators fail the conditioning test.
///
/// Returns the instances and the number of redraws.
pub fn fuzz_instances(count: usize, max_dim: usize, max_edges: usize, seed: u64, cfg: &ProjectionConfig) -> Result<(Vec<FuzzInstance>, usize)> {
    if max_dim == 0 || max_edges == 0 {
        return Err(Error::InvalidConfig("max_dim and max_edges must be positive".into()));
    }
    if max_edges > MAX_ORACLE_EDGES {
        return Err(Error::InvalidConfig(format!("max_edges must not exceed {MAX_ORACLE_EDGES}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut redrawn = 0;
    while out.len() < count {
        let dim = rng.random_range(1..=max_dim);
        let n_free = rng.random_range(0..=MAX_FREE.min(dim - 1));
        let n_edges = rng.random_range(1..=max_edges.min(dim - n_free));
        let mut gauss = || Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let edges: Vec<Vector> = (0..n_edges).map(|_| gauss()).collect();
        let free: Vec<Vector> = (0..n_free).map(|_| gauss()).collect();
        let v = gauss() * 3.0;
        match ConeBasis::with_cond_tol(dim, edges, free, cfg.cond_tol) {
            Ok(basis) => out.push(FuzzInstance { basis, v }),
            Err(Error::LicqFailure { .. }) => redrawn += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((out, redrawn))
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzReport {
    pub count: usize,
    pub max_dim: usize,
    pub max_edges: usize,
    pub seed: u64,
    pub redrawn: usize,
    pub max_point_discrepancy: f64,
    pub max_coeff_discrepancy: f64,
    pub tol: f64,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.max_point_discrepancy <= self.tol && self.max_coeff_discrepancy <= self.tol
    }
}

/// Compares the iterative projection with the oracle on seeded random instances.
pub fn fuzz_projection(count: usize, max_dim: usize, max_edges: usize, seed: u64, cfg: &ProjectionConfig) -> Result<FuzzReport> {
    let (instances, redrawn) = fuzz_instances(count, max_dim, max_edges, seed, cfg)?;
    let mut max_point: f64 = 0.0;
    let mut max_coeff: f64 = 0.0;
    for inst in &instances {
        let got = project_onto_cone(&inst.basis, &inst.v, cfg)?;
        let want = oracle_project_subset_enumeration(&inst.basis, &inst.v)?;
        max_point = max_point.max((&got.point - &want.point).norm());
        let coeff = (&got.mu - &want.mu).amax().max(if got.lambda.is_empty() { 0.0 } else { (&got.lambda - &want.lambda).amax() });
        max_coeff = max_coeff.max(coeff);
    }
    Ok(FuzzReport {
        count,
        max_dim,
        max_edges,
        seed,
        redrawn,
        max_point_discrepancy: max_point,
        max_coeff_discrepancy: max_coeff,
        tol: 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_instances_pass() {
        let r = fuzz_projection(0, 6, 6, 1, &ProjectionConfig::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_point_discrepancy, 0.0);
    }

    #[test]
    fn instances_respect_limits_and_seed() {
        let cfg = ProjectionConfig::default();
        let (a, _) = fuzz_instances(200, 4, 3, 9, &cfg).unwrap();
        let (b, _) = fuzz_instances(200, 4, 3, 9, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.v, y.v);
            assert!(x.basis.dim() <= 4 && x.basis.edges().len() <= 3 && x.basis.free().len() <= MAX_FREE);
            assert!(x.basis.len() <= x.basis.dim());
        }
        assert!(a.iter().any(|x| !x.basis.free().is_empty()));
        assert!(a.iter().any(|x| x.basis.free().is_empty()));
    }

    #[test]
    fn too_many_edges_is_rejected() {
        assert!(fuzz_projection(1, 6, 25, 1, &ProjectionConfig::default()).is_err());
    }

    #[test]
    fn small_run_matches_oracle() {
        let r = fuzz_projection(100, 5, 5, 3, &ProjectionConfig::default()).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
