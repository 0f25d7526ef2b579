//! Exact cone projection by enumerating faces.
//!
//! For every subset `S` of the edges, the least-squares projection of `v`
//! onto `span(S ∪ free)` is computed by Householder QR (not through the Gram
//! matrix). A subset is accepted when its edge coefficients are nonnegative
//! and the residual makes a non-acute angle with every excluded edge, which is
//! exactly the KKT characterization of the cone projection. Cost is `2^m`
//! least-squares solves, so this is only meant for checking small instances.

use nalgebra::DMatrix;

use crate::cone::{ConeBasis, ProjectionResult};
use crate::error::{Error, Result};
use crate::problem::Vector;

pub const MAX_ORACLE_EDGES: usize = 20;

/// Projection of `v` onto `cone(edges) ⊕ span(free)` by subset enumeration.
pub fn oracle_project_subset_enumeration(basis: &ConeBasis, v: &Vector) -> Result<ProjectionResult> {
    let m = basis.edges().len();
    assert!(m <= MAX_ORACLE_EDGES, "subset enumeration limited to {MAX_ORACLE_EDGES} edges");
    if v.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: v.len() });
    }
    let scale = v.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-9 * scale;

    let mut best: Option<(f64, ProjectionResult)> = None;
    for mask in 0u32..(1u32 << m) {
        let chosen: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let cols: Vec<&Vector> = chosen.iter().map(|&i| &basis.edges()[i]).chain(basis.free()).collect();
        let Some(coeffs) = least_squares(basis.dim(), &cols, v) else {
            continue;
        };
        let k = chosen.len();
        let edge_scale: Vec<f64> = chosen.iter().map(|&i| basis.edges()[i].norm()).collect();
        if (0..k).any(|a| coeffs[a] * edge_scale[a] < -tol) {
            continue;
        }
        let mut point = Vector::zeros(basis.dim());
        for (c, col) in coeffs.iter().zip(&cols) {
            point.axpy(*c, col, 1.0);
        }
        let residual = v - &point;
        let excluded_ok = (0..m)
            .filter(|i| !chosen.contains(i))
            .all(|i| residual.dot(&basis.edges()[i]) <= tol * basis.edges()[i].norm());
        if !excluded_ok {
            continue;
        }
        // Several faces can qualify within tolerance near degeneracy; keep the
        // closest point.
        let dist = residual.norm();
        if best.as_ref().is_some_and(|(d, _)| *d <= dist) {
            continue;
        }
        let mut mu = Vector::zeros(m);
        for (a, &i) in chosen.iter().enumerate() {
            mu[i] = coeffs[a].max(0.0);
        }
        let lambda = Vector::from_iterator(basis.free().len(), coeffs.iter().skip(k).copied());
        best = Some((dist, ProjectionResult { point, mu, lambda, residual }));
    }
    best.map(|(_, r)| r).ok_or(Error::LicqFailure { rcond: basis.rcond() })
}

/// `argmin_x |A x - v|` for `A` with the given columns; `None` if `A` is rank deficient.
fn least_squares(dim: usize, cols: &[&Vector], v: &Vector) -> Option<Vector> {
    if cols.is_empty() {
        return Some(Vector::zeros(0));
    }
    if cols.len() > dim {
        return None;
    }
    let a = DMatrix::from_columns(&cols.iter().map(|c| (*c).clone()).collect::<Vec<_>>());
    let qr = a.qr();
    let r = qr.r();
    let rmax = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-10 * rmax) {
        return None;
    }
    let qtv = qr.q().transpose() * v;
    r.solve_upper_triangular(&qtv)
}
