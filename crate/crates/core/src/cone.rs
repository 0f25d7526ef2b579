//! Projection onto a finitely generated cone `cone{e_1..e_m} ⊕ span{f_1..f_q}`.
//!
//! The projection is computed in coefficient space in two steps: first the
//! unconstrained projection onto the span of all generators, whose
//! coefficients `x̄` solve the Gram system `G x̄ = B'v`; then the quadratic
//! `½ (x - x̄)' G (x - x̄)` is minimized with `x_i >= 0` on the edge coordinates
//! by the truncated-gradient orthant scheme. The projection onto the cone
//! equals the cone projection of the span projection, so the minimizer's
//! coefficients give the cone projection of `v` itself.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::config::ProjectionConfig;
use crate::error::{Error, Result};
use crate::problem::Vector;

/// Generators of a cone (`edges`) plus an optional free subspace (`free`).
///
/// The Gram matrix of `edges ++ free` is formed once at construction and the
/// generators are rejected when it is numerically singular.
#[derive(Debug, Clone)]
pub struct ConeBasis {
    dim: usize,
    edges: Vec<Vector>,
    free: Vec<Vector>,
    gram: DMatrix<f64>,
    rcond: f64,
}

impl ConeBasis {
    pub fn new(dim: usize, edges: Vec<Vector>, free: Vec<Vector>) -> Result<Self> {
        Self::with_cond_tol(dim, edges, free, ProjectionConfig::default().cond_tol)
    }

    pub fn with_cond_tol(dim: usize, edges: Vec<Vector>, free: Vec<Vector>, cond_tol: f64) -> Result<Self> {
        for v in edges.iter().chain(&free) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
        }
        let all: Vec<&Vector> = edges.iter().chain(&free).collect();
        let k = all.len();
        let gram = DMatrix::from_fn(k, k, |i, j| all[i].dot(all[j]));
        let rcond = reciprocal_condition(&gram);
        if k > 0 && !(rcond >= cond_tol) {
            return Err(Error::LicqFailure { rcond });
        }
        Ok(ConeBasis { dim, edges, free, gram, rcond })
    }

    pub fn empty(dim: usize) -> Self {
        ConeBasis { dim, edges: vec![], free: vec![], gram: DMatrix::zeros(0, 0), rcond: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edges(&self) -> &[Vector] {
        &self.edges
    }

    pub fn free(&self) -> &[Vector] {
        &self.free
    }

    /// Number of generators, `edges.len() + free.len()`.
    pub fn len(&self) -> usize {
        self.edges.len() + self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Estimated reciprocal condition number of the Gram matrix.
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    /// Generators in order, edges first.
    pub fn vectors(&self) -> impl Iterator<Item = &Vector> {
        self.edges.iter().chain(&self.free)
    }

    /// `dim x len` matrix with the generators as columns.
    pub fn matrix(&self) -> DMatrix<f64> {
        let cols: Vec<Vector> = self.vectors().cloned().collect();
        if cols.is_empty() {
            DMatrix::zeros(self.dim, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }

    /// Basis keeping only the listed edges (0-based positions) and all free vectors.
    pub fn restrict_edges(&self, keep: &[usize]) -> ConeBasis {
        let m = self.edges.len();
        let idx: Vec<usize> = keep.iter().copied().chain(m..self.len()).collect();
        let gram = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.gram[(idx[i], idx[j])]);
        let rcond = reciprocal_condition(&gram);
        ConeBasis {
            dim: self.dim,
            edges: keep.iter().map(|&i| self.edges[i].clone()).collect(),
            free: self.free.clone(),
            gram,
            rcond,
        }
    }

    /// `sum_i coeffs_i * b_i` over `edges ++ free`.
    pub fn combine(&self, coeffs: &Vector) -> Vector {
        debug_assert_eq!(coeffs.len(), self.len());
        let mut out = Vector::zeros(self.dim);
        for (c, b) in coeffs.iter().zip(self.vectors()) {
            out.axpy(*c, b, 1.0);
        }
        out
    }
}

fn reciprocal_condition(gram: &DMatrix<f64>) -> f64 {
    if gram.nrows() == 0 {
        return 1.0;
    }
    let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || !max.is_finite() {
        return 0.0;
    }
    (min / max).max(0.0)
}

/// Gram matrix `[<b_i, b_j>]` over `edges ++ free`.
pub fn gram_matrix(basis: &ConeBasis) -> &DMatrix<f64> {
    &basis.gram
}

/// Coefficients `x̄` of the orthogonal projection of `v` onto `span(basis)`,
/// i.e. the solution of `G x̄ = [<v, b_j>]`.
pub fn span_projection_coeffs(basis: &ConeBasis, v: &Vector) -> Result<Vector> {
    if v.len() != basis.dim {
        return Err(Error::DimensionMismatch { expected: basis.dim, found: v.len() });
    }
    let rhs = Vector::from_iterator(basis.len(), basis.vectors().map(|b| b.dot(v)));
    solve_spd(&basis.gram, &rhs).ok_or(Error::LicqFailure { rcond: basis.rcond })
}

pub(crate) fn solve_spd(g: &DMatrix<f64>, rhs: &Vector) -> Option<Vector> {
    if g.nrows() == 0 {
        return Some(Vector::zeros(0));
    }
    let chol = g.clone().cholesky()?;
    let x = chol.solve(rhs);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// The truncation `v^P`: component `i` becomes zero when `i` is in `zero_set`
/// (0-based coordinates) and `v_i < 0`; all other components pass through.
pub fn truncate_p(v: &Vector, zero_set: &[usize]) -> Vector {
    let mut out = v.clone();
    for &i in zero_set {
        if out[i] < 0.0 {
            out[i] = 0.0;
        }
    }
    out
}

/// One step of the orthant scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthantStep {
    pub alpha: f64,
    /// `|p|^2` for the truncated direction `p` of this step.
    pub p_norm_sq: f64,
    /// Objective change `f(x_next) - f(x)`.
    pub decrease: f64,
    /// The step was shortened to keep `x >= 0`.
    pub capped: bool,
}

/// Result of the orthant quadratic minimization.
#[derive(Debug, Clone)]
pub struct OrthantSolution {
    pub x: Vector,
    pub iterations: usize,
    /// Objective value before each step and at the end.
    pub objective: Vec<f64>,
    pub steps: Vec<OrthantStep>,
    /// The iteration finished with an exact solve on the identified face.
    pub face_solve: bool,
    pub residual: f64,
}

/// Minimizes `½ (x - x̄)' G (x - x̄)` subject to `x >= 0`, starting from `x0 >= 0`.
pub fn orthant_qp_minimize(g: &DMatrix<f64>, xbar: &Vector, x0: &Vector, cfg: &ProjectionConfig) -> Result<OrthantSolution> {
    minimize_partial_orthant(g, xbar, x0, xbar.len(), cfg)
}

fn quad_objective(g: &DMatrix<f64>, xbar: &Vector, x: &Vector) -> f64 {
    let r = x - xbar;
    0.5 * r.dot(&(g * &r))
}

/// Orthant scheme with only the first `signed` coordinates sign-constrained.
///
/// Each iteration moves along `p = [-G(x - x̄)]^P` with stepsize
/// `min(c_q |p|^2 / p'Gp, |p|^2 / p'Gp, cap)`, where `cap` keeps the signed
/// coordinates nonnegative and lands the blocking coordinate exactly on zero.
/// When the coordinates held at zero by the truncation identify the optimal
/// face, the reduced Gram system on the remaining coordinates is solved
/// directly and accepted if it passes the fixed-point test.
pub(crate) fn minimize_partial_orthant(
    g: &DMatrix<f64>,
    xbar: &Vector,
    x0: &Vector,
    signed: usize,
    cfg: &ProjectionConfig,
) -> Result<OrthantSolution> {
    let n = xbar.len();
    assert_eq!(g.nrows(), n);
    assert_eq!(x0.len(), n);
    assert!(signed <= n);
    debug_assert!(x0.iter().take(signed).all(|&v| v >= 0.0), "start must lie in the orthant");

    let gxbar = g * xbar;
    let tol = cfg.inner_eps * gxbar.norm().max(1.0);

    let mut x = x0.clone();
    let mut objective = vec![quad_objective(g, xbar, &x)];
    let mut steps = Vec::new();
    let mut last_fixed: Option<Vec<usize>> = None;

    for iter in 0..=cfg.inner_max_iter {
        let neg_grad = &gxbar - g * &x;
        if !neg_grad.iter().all(|v| v.is_finite()) {
            return Err(Error::Evaluation {
                function: crate::error::FnId::Objective,
                detail: "non-finite arithmetic in orthant solver".into(),
            });
        }
        let zero_set: Vec<usize> = (0..signed).filter(|&i| x[i] <= cfg.zero_tol).collect();
        let p = truncate_p(&neg_grad, &zero_set);
        let pp = p.norm_squared();
        if pp.sqrt() <= tol {
            return Ok(OrthantSolution { x, iterations: iter, objective, steps, face_solve: false, residual: pp.sqrt() });
        }
        if iter == cfg.inner_max_iter {
            return Err(Error::InnerSolverStall { iterations: iter, residual: pp.sqrt() });
        }

        let fixed: Vec<usize> = zero_set.iter().copied().filter(|&i| neg_grad[i] < 0.0).collect();
        if last_fixed.as_ref() == Some(&fixed) {
            if let Some((xf, res)) = face_solve(g, &gxbar, &fixed, signed, cfg.zero_tol, tol) {
                objective.push(quad_objective(g, xbar, &xf));
                return Ok(OrthantSolution { x: xf, iterations: iter + 1, objective, steps, face_solve: true, residual: res });
            }
        }
        last_fixed = Some(fixed);

        let gp = g * &p;
        let pgp = p.dot(&gp);
        let line_min = pp / pgp;
        let mut alpha = (cfg.step_constant * line_min).min(line_min);
        let mut blocking = None;
        for i in 0..signed {
            if p[i] < 0.0 {
                let limit = x[i] / -p[i];
                if limit < alpha {
                    alpha = limit;
                    blocking = Some(i);
                }
            }
        }
        x.axpy(alpha, &p, 1.0);
        for i in 0..signed {
            if x[i] < 0.0 {
                x[i] = 0.0;
            }
        }
        if let Some(i) = blocking {
            x[i] = 0.0;
        }
        let f_next = quad_objective(g, xbar, &x);
        let f_prev = *objective.last().unwrap();
        let decrease = f_next - f_prev;
        debug_assert!(
            decrease <= -(alpha / 4.0) * pp + 1e-12 * f_prev.abs().max(1.0),
            "orthant step violated the quadratic descent margin"
        );
        objective.push(f_next);
        steps.push(OrthantStep { alpha, p_norm_sq: pp, decrease, capped: blocking.is_some() });
    }
    unreachable!("loop returns on its final iteration")
}

/// Exact minimizer with the `fixed` coordinates held at zero, if it satisfies
/// the orthant fixed-point conditions.
fn face_solve(
    g: &DMatrix<f64>,
    gxbar: &Vector,
    fixed: &[usize],
    signed: usize,
    zero_tol: f64,
    tol: f64,
) -> Option<(Vector, f64)> {
    let n = gxbar.len();
    let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    let k = free.len();
    let mut x = Vector::zeros(n);
    if k > 0 {
        let gff = DMatrix::from_fn(k, k, |a, b| g[(free[a], free[b])]);
        let rhs = Vector::from_iterator(k, free.iter().map(|&i| gxbar[i]));
        let xf = solve_spd(&gff, &rhs)?;
        for (a, &i) in free.iter().enumerate() {
            x[i] = xf[a];
        }
    }
    for i in 0..signed {
        if x[i] < 0.0 {
            if x[i] < -zero_tol.max(1e-14 * x.amax()) {
                return None;
            }
            x[i] = 0.0;
        }
    }
    let neg_grad = gxbar - g * &x;
    let zero_set: Vec<usize> = (0..signed).filter(|&i| x[i] <= zero_tol).collect();
    let res = truncate_p(&neg_grad, &zero_set).norm();
    (res <= tol).then_some((x, res))
}

/// Projection of a vector onto a cone, with its coefficients.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    /// `P_C(v)`.
    pub point: Vector,
    /// Nonnegative coefficients on the edges.
    pub mu: Vector,
    /// Unconstrained coefficients on the free vectors.
    pub lambda: Vector,
    /// `v - P_C(v)`.
    pub residual: Vector,
}

/// Projects `v` onto `cone(edges) ⊕ span(free)`.
///
/// An empty basis is the cone `{0}`.
pub fn project_onto_cone(basis: &ConeBasis, v: &Vector, cfg: &ProjectionConfig) -> Result<ProjectionResult> {
    if v.len() != basis.dim {
        return Err(Error::DimensionMismatch { expected: basis.dim, found: v.len() });
    }
    let m = basis.edges.len();
    if basis.is_empty() {
        return Ok(ProjectionResult {
            point: Vector::zeros(basis.dim),
            mu: Vector::zeros(0),
            lambda: Vector::zeros(0),
            residual: v.clone(),
        });
    }
    let xbar = span_projection_coeffs(basis, v)?;
    let x0 = Vector::from_iterator(xbar.len(), xbar.iter().enumerate().map(|(i, &c)| if i < m { c.max(0.0) } else { c }));
    let sol = minimize_partial_orthant(&basis.gram, &xbar, &x0, m, cfg)?;
    Ok(assemble(basis, v, sol.x))
}

/// Largest edge count for which dependent generators are reduced by enumeration.
pub const MAX_REDUCED_EDGES: usize = 20;

/// Projects `v` onto `cone(edges) ⊕ span(free)` without requiring the edges to
/// be linearly independent.
///
/// When the full generator set passes the conditioning test this is
/// [`project_onto_cone`]. Otherwise the projection is taken over the
/// conditioned edge subsets (every point of a finitely generated cone lies in
/// the cone of an independent subset of generators), accepting the closest
/// candidate whose residual is non-acute to every edge. Multipliers of
/// unused edges are zero. The free vectors must still be independent.
pub fn project_onto_generators(
    dim: usize,
    edges: &[Vector],
    free: &[Vector],
    v: &Vector,
    cfg: &ProjectionConfig,
) -> Result<ProjectionResult> {
    let err = match ConeBasis::with_cond_tol(dim, edges.to_vec(), free.to_vec(), cfg.cond_tol) {
        Ok(basis) => return project_onto_cone(&basis, v, cfg),
        Err(e @ Error::LicqFailure { .. }) => e,
        Err(e) => return Err(e),
    };
    let m = edges.len();
    if m == 0 || m > MAX_REDUCED_EDGES {
        return Err(err);
    }
    ConeBasis::with_cond_tol(dim, vec![], free.to_vec(), cfg.cond_tol)?;
    let tol = 1e-9 * v.norm().max(f64::MIN_POSITIVE);

    let mut best: Option<(f64, ProjectionResult, Vec<usize>)> = None;
    for mask in 0u32..(1u32 << m) {
        let chosen: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        if chosen.len() + free.len() > dim {
            continue;
        }
        let sub = chosen.iter().map(|&i| edges[i].clone()).collect();
        let Ok(basis) = ConeBasis::with_cond_tol(dim, sub, free.to_vec(), cfg.cond_tol) else {
            continue;
        };
        let r = project_onto_cone(&basis, v, cfg)?;
        let polar = (0..m).all(|i| r.residual.dot(&edges[i]) <= tol * edges[i].norm());
        let dist = r.residual.norm();
        if polar && best.as_ref().map_or(true, |(d, _, _)| dist < *d) {
            best = Some((dist, r, chosen));
        }
    }
    let (_, r, chosen) = best.ok_or(err)?;
    let mut mu = Vector::zeros(m);
    for (a, &i) in chosen.iter().enumerate() {
        mu[i] = r.mu[a];
    }
    Ok(ProjectionResult { mu, ..r })
}

pub(crate) fn assemble(basis: &ConeBasis, v: &Vector, coeffs: Vector) -> ProjectionResult {
    let m = basis.edges.len();
    let point = basis.combine(&coeffs);
    let residual = v - &point;
    ProjectionResult {
        mu: coeffs.rows(0, m).into_owned(),
        lambda: coeffs.rows(m, coeffs.len() - m).into_owned(),
        point,
        residual,
    }
}
