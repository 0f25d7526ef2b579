//! Active index set, the correctable steepest descent direction and the
//! working index set.
//!
//! At a feasible `u` with active set `I_A`, the direction is
//! `d = -J'(u) - P(-J'(u))`, where `P` projects onto
//! `cone{g'_i(u) : i in I_A} ⊕ span{h'_j(u)}`. `d = 0` exactly at KKT points.
//! Active constraints whose gradient is orthogonal to `d` form the working
//! set `I_W`; the remaining active indices have `<g'_i, d> < 0`, so stepping
//! along `d` moves strictly off them (false active indices).

use crate::cone::{project_onto_generators, span_projection_coeffs, ConeBasis};
use crate::config::ProjectionConfig;
use crate::error::{Error, FnId, Result};
use crate::problem::{IndexSet, Problem, Vector};

/// Absolute floor for the working-set test, used when `|d|` is tiny.
const WIS_ABS_FLOOR: f64 = 1e-12;

/// `{i : |g_i(u)| <= active_tol}`.
pub fn active_set(problem: &Problem, u: &Vector, active_tol: f64) -> Result<IndexSet> {
    problem.check_dim(u)?;
    Ok(problem
        .inequality_values(u)?
        .iter()
        .enumerate()
        .filter(|(_, g)| g.abs() <= active_tol)
        .map(|(i, _)| i + 1)
        .collect())
}

/// The descent direction at one point together with the data it was built from.
#[derive(Debug, Clone)]
pub struct DirectionBundle {
    pub d: Vector,
    pub d_norm: f64,
    /// `I_A`, ascending.
    pub active: IndexSet,
    /// `I_W ⊆ I_A`. Empty until [`DirectionBundle::classify`] runs.
    pub working: IndexSet,
    /// `I_A \ I_W`.
    pub fai: IndexSet,
    /// Cone multipliers aligned with `active`; exactly zero on `fai`.
    pub mu: Vec<f64>,
    /// Multipliers of the equality constraints.
    pub lambda: Vec<f64>,
    /// Projection of `-J'(u)` onto the active cone.
    pub proj: Vector,
    /// `J'(u)`.
    pub gradient: Vector,
    /// `g'_i(u)` for `i` in `active`, same order.
    pub active_gradients: Vec<Vector>,
    /// `h'_j(u)` for every equality.
    pub equality_gradients: Vec<Vector>,
}

impl DirectionBundle {
    /// Splits the active set into working and false-active indices and zeroes
    /// the multipliers of the latter.
    pub fn classify(&mut self, wis_rel_tol: f64) -> Result<()> {
        self.working = working_index_set(&self.active, &self.active_gradients, &self.d, wis_rel_tol)?;
        self.fai = self.active.iter().copied().filter(|i| !self.working.contains(i)).collect();
        for (pos, i) in self.active.iter().enumerate() {
            if !self.working.contains(i) {
                self.mu[pos] = 0.0;
            }
        }
        Ok(())
    }

    /// Gradient `g'_i(u)` of an active index.
    pub fn active_gradient(&self, i: usize) -> Option<&Vector> {
        self.active.iter().position(|&a| a == i).map(|pos| &self.active_gradients[pos])
    }

    /// Correction basis: working-set gradients as edges, equality gradients as free vectors.
    pub fn working_basis(&self, cfg: &ProjectionConfig) -> Result<ConeBasis> {
        let edges = self.working.iter().map(|&i| self.active_gradient(i).unwrap().clone()).collect();
        ConeBasis::with_cond_tol(self.d.len(), edges, self.equality_gradients.clone(), cfg.cond_tol)
    }

    /// Active cone basis used to build `d`.
    pub fn active_basis(&self, cfg: &ProjectionConfig) -> Result<ConeBasis> {
        ConeBasis::with_cond_tol(self.d.len(), self.active_gradients.clone(), self.equality_gradients.clone(), cfg.cond_tol)
    }
}

/// Correctable steepest descent direction at `u` for the given active set.
///
/// With no active inequalities and no equalities this is `-J'(u)`; with only
/// equalities it is the residual of projecting `-J'(u)` onto their gradient span.
/// The working set is left empty; see [`DirectionBundle::classify`].
pub fn csdd(problem: &Problem, u: &Vector, active: &[usize], cfg: &ProjectionConfig) -> Result<DirectionBundle> {
    problem.check_dim(u)?;
    let gradient = problem.objective_gradient(u)?;
    let active_gradients = active
        .iter()
        .map(|&i| problem.eval_gradient(FnId::Inequality(i), u))
        .collect::<Result<Vec<_>>>()?;
    let equality_gradients = (1..=problem.num_equalities())
        .map(|j| problem.eval_gradient(FnId::Equality(j), u))
        .collect::<Result<Vec<_>>>()?;

    let neg = -&gradient;
    let (d, proj, mu, lambda) = if active.is_empty() && equality_gradients.is_empty() {
        (neg, Vector::zeros(u.len()), vec![], vec![])
    } else {
        let r = project_onto_generators(u.len(), &active_gradients, &equality_gradients, &neg, cfg)?;
        (r.residual, r.point, r.mu.iter().copied().collect(), r.lambda.iter().copied().collect())
    };
    Ok(DirectionBundle {
        d_norm: d.norm(),
        d,
        active: active.to_vec(),
        working: vec![],
        fai: vec![],
        mu,
        lambda,
        proj,
        gradient,
        active_gradients,
        equality_gradients,
    })
}

/// `{i in active : |<g'_i, d>| <= wis_rel_tol * |d|}`.
///
/// `gradients` is aligned with `active`. Every excluded index must have
/// `<g'_i, d> < 0`; a positive product beyond the threshold means the
/// projection was wrong and is reported as [`Error::InternalProjection`].
pub fn working_index_set(active: &[usize], gradients: &[Vector], d: &Vector, wis_rel_tol: f64) -> Result<IndexSet> {
    assert_eq!(active.len(), gradients.len());
    let threshold = (wis_rel_tol * d.norm()).max(WIS_ABS_FLOOR);
    let mut working = Vec::new();
    for (&i, g) in active.iter().zip(gradients) {
        let inner = g.dot(d);
        if inner.abs() <= threshold {
            working.push(i);
        } else if inner > 0.0 {
            return Err(Error::InternalProjection { index: i, inner });
        }
    }
    Ok(working)
}

/// `|d| < eps`: the point is KKT to within the termination threshold.
pub fn is_kkt(bundle: &DirectionBundle, eps: f64) -> bool {
    bundle.d_norm < eps
}

/// `-J'(u)` minus its projection onto the *span* of the active and equality
/// gradients. Vanishes whenever `-J'(u)` lies in that span, including when the
/// coefficients have the wrong sign, so unlike [`csdd`] it does not certify KKT.
pub fn subspace_direction(problem: &Problem, u: &Vector, active: &[usize], cfg: &ProjectionConfig) -> Result<Vector> {
    let neg = -problem.objective_gradient(u)?;
    let edges = active
        .iter()
        .map(|&i| problem.eval_gradient(FnId::Inequality(i), u))
        .collect::<Result<Vec<_>>>()?;
    let free = (1..=problem.num_equalities())
        .map(|j| problem.eval_gradient(FnId::Equality(j), u))
        .collect::<Result<Vec<_>>>()?;
    if edges.is_empty() && free.is_empty() {
        return Ok(neg);
    }
    let basis = ConeBasis::with_cond_tol(u.len(), edges, free, cfg.cond_tol)?;
    let x = span_projection_coeffs(&basis, &neg)?;
    Ok(neg - basis.combine(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Function;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn cfg() -> ProjectionConfig {
        ProjectionConfig::default()
    }

    fn half_norm_sq() -> Function {
        Function::new(|u: &Vector| 0.5 * u.norm_squared(), |u: &Vector| u.clone())
    }

    /// `J(x) = ½|x - a|^2` over `x >= 0`, written as `g_i = -x_i`.
    fn orthant(a: &[f64]) -> Problem {
        let target = v(a);
        let t2 = target.clone();
        let mut p = Problem::new("orthant", a.len(), Function::new(move |x: &Vector| 0.5 * (x - &target).norm_squared(), move |x: &Vector| x - &t2));
        for i in 0..a.len() {
            let mut e = Vector::zeros(a.len());
            e[i] = -1.0;
            p = p.with_inequality(Function::affine(e, 0.0));
        }
        p
    }

    #[test]
    fn unconstrained_direction_is_negative_gradient() {
        let p = Problem::new("q", 2, half_norm_sq());
        let b = csdd(&p, &v(&[1.0, 2.0]), &[], &cfg()).unwrap();
        assert_eq!(b.d, v(&[-1.0, -2.0]));
        assert!(b.working.is_empty());
    }

    #[test]
    fn orthant_direction_matches_componentwise_formula() {
        // -J'(x) = a - x = (-1, 2, -0.5) at x = 0; coordinates 1 and 3 are truncated.
        let p = orthant(&[-1.0, 2.0, -0.5]);
        let x = Vector::zeros(3);
        let active = active_set(&p, &x, 1e-5).unwrap();
        assert_eq!(active, vec![1, 2, 3]);
        let mut b = csdd(&p, &x, &active, &cfg()).unwrap();
        assert!((b.d.clone() - v(&[0.0, 2.0, 0.0])).norm() < 1e-14);
        b.classify(1e-5).unwrap();
        assert_eq!(b.working, vec![1, 3]);
        assert_eq!(b.fai, vec![2]);
        assert_eq!(b.mu[1], 0.0);
    }

    #[test]
    fn empty_active_set_gives_empty_working_set() {
        assert!(working_index_set(&[], &[], &v(&[1.0, 0.0]), 1e-5).unwrap().is_empty());
    }

    #[test]
    fn positive_inner_product_is_rejected() {
        let err = working_index_set(&[4], &[v(&[1.0, 0.0])], &v(&[1.0, 0.0]), 1e-5).unwrap_err();
        assert!(matches!(err, Error::InternalProjection { index: 4, .. }));
    }

    #[test]
    fn kkt_threshold_is_strict() {
        let p = Problem::new("q", 1, half_norm_sq());
        let b = csdd(&p, &v(&[0.0]), &[], &cfg()).unwrap();
        assert!(is_kkt(&b, 1e-4));
        let b = csdd(&p, &v(&[1e-4]), &[], &cfg()).unwrap();
        assert!(!is_kkt(&b, 1e-4));
    }

    #[test]
    fn subspace_direction_misses_wrong_signed_multiplier() {
        // Single active g = x_1 - 1 <= 0 with J' = g': -J' lies in the span with
        // coefficient -1, so d_S = 0, while the cone projection is the apex.
        let p = Problem::new("lin", 2, Function::affine(v(&[1.0, 0.0]), 0.0)).with_inequality(Function::affine(v(&[1.0, 0.0]), -1.0));
        let u = v(&[1.0, 0.5]);
        let d_s = subspace_direction(&p, &u, &[1], &cfg()).unwrap();
        assert!(d_s.norm() < 1e-15);
        let b = csdd(&p, &u, &[1], &cfg()).unwrap();
        assert!((b.d - v(&[-1.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn subspace_direction_with_orthonormal_gradients() {
        let p = orthant(&[3.0, -2.0]);
        let d_s = subspace_direction(&p, &Vector::zeros(2), &[2], &cfg()).unwrap();
        assert!((d_s - v(&[3.0, 0.0])).norm() < 1e-14);
        let d_s = subspace_direction(&p, &Vector::zeros(2), &[], &cfg()).unwrap();
        assert_eq!(d_s, v(&[3.0, -2.0]));
    }
}
