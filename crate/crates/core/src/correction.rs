//! Feasibility-restoring correction along the working constraints.
//!
//! For a step `u + t d`, coefficients `c` are found so that
//! `u(t) = u + t d + B c` satisfies `g_i(u(t)) = 0` for every working index
//! and `h_j(u(t)) = 0` for every equality. `B` holds the gradients at the base
//! point `u` as columns and stays fixed during the solve. By the implicit
//! function theorem `|B c(t)| = o(t)` for small `t`.

use nalgebra::DMatrix;

use crate::cone::ConeBasis;
use crate::config::SolverConfig;
use crate::error::{Error, FnId, Result};
use crate::problem::{Problem, Vector};

#[derive(Debug, Clone)]
pub struct CorrectionOutcome {
    /// The corrected point `u(t)`.
    pub u_t: Vector,
    /// Coefficients on the working gradients followed by the equality gradients.
    pub c: Vector,
    pub newton_iters: usize,
    /// `max |g_i(u(t))|` over the corrected constraints.
    pub residual_norm: f64,
}

fn correction_rows(problem: &Problem, basis: &ConeBasis, working: &[usize]) -> Vec<FnId> {
    assert_eq!(basis.edges().len(), working.len(), "basis edges must match the working set");
    assert_eq!(basis.free().len(), problem.num_equalities(), "basis free vectors must match the equalities");
    working
        .iter()
        .map(|&i| FnId::Inequality(i))
        .chain((1..=problem.num_equalities()).map(FnId::Equality))
        .collect()
}

fn residuals(problem: &Problem, rows: &[FnId], x: &Vector) -> Result<Vector> {
    let vals = rows.iter().map(|&id| problem.eval(id, x)).collect::<Result<Vec<_>>>()?;
    Ok(Vector::from_vec(vals))
}

/// Solves `g_i(u + t d + B c) = 0` on the working basis by Newton's method from `c = 0`.
///
/// `basis` holds `g'_i(u)` for `i` in `working` (in that order) as edges and
/// every `h'_j(u)` as free vectors. The first Newton step uses the Gram matrix
/// of the basis, which is the exact Jacobian at `t = 0, c = 0`; later steps
/// re-evaluate `<g'_i(u + t d + B c), b_j>`.
pub fn correct(
    problem: &Problem,
    u: &Vector,
    d: &Vector,
    basis: &ConeBasis,
    working: &[usize],
    t: f64,
    cfg: &SolverConfig,
) -> Result<CorrectionOutcome> {
    let rows = correction_rows(problem, basis, working);
    let base = u + d * t;
    let k = rows.len();
    let mut c = Vector::zeros(k);
    if k == 0 {
        return Ok(CorrectionOutcome { u_t: base, c, newton_iters: 0, residual_norm: 0.0 });
    }
    let columns: Vec<&Vector> = basis.vectors().collect();
    let mut x = base.clone();
    let mut f = residuals(problem, &rows, &x)?;
    let mut iters = 0;
    loop {
        let res = f.amax();
        if res <= cfg.newton_tol {
            return Ok(CorrectionOutcome { u_t: x, c, newton_iters: iters, residual_norm: res });
        }
        if iters >= cfg.newton_max_iter {
            return Err(Error::NewtonStall { iterations: iters, residual: res });
        }
        let jac = if iters == 0 {
            crate::cone::gram_matrix(basis).clone()
        } else {
            let grads = rows.iter().map(|&id| problem.eval_gradient(id, &x)).collect::<Result<Vec<_>>>()?;
            DMatrix::from_fn(k, k, |i, j| grads[i].dot(columns[j]))
        };
        let step = jac.lu().solve(&(-&f)).ok_or(Error::LicqFailure { rcond: 0.0 })?;
        if !step.iter().all(|s| s.is_finite()) {
            return Err(Error::LicqFailure { rcond: 0.0 });
        }
        c += step;
        x = &base + basis.combine(&c);
        f = residuals(problem, &rows, &x)?;
        iters += 1;
    }
}

/// `(t, |B c(t)| / t)` for each `t` in `t_list`.
///
/// The ratios tend to zero as `t -> 0`; for C² constraints they decay like `O(t)`.
pub fn superlinearity_probe(
    problem: &Problem,
    u: &Vector,
    d: &Vector,
    basis: &ConeBasis,
    working: &[usize],
    t_list: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<(f64, f64)>> {
    t_list
        .iter()
        .map(|&t| {
            let out = correct(problem, u, d, basis, working, t, cfg)?;
            Ok((t, basis.combine(&out.c).norm() / t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Function;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn circle() -> Problem {
        Problem::new("circle", 2, Function::affine(v(&[1.0, 0.0]), 0.0))
            .with_inequality(Function::new(|u: &Vector| u.norm_squared() - 2.0, |u: &Vector| u * 2.0))
    }

    fn halfplane() -> Problem {
        Problem::new("halfplane", 2, Function::affine(v(&[1.0, 0.0]), 0.0)).with_inequality(Function::affine(v(&[1.0, 1.0]), -1.0))
    }

    #[test]
    fn linear_constraint_needs_no_correction() {
        let p = halfplane();
        let u = v(&[0.25, 0.75]);
        let d = v(&[-1.0, 1.0]);
        let basis = ConeBasis::new(2, vec![v(&[1.0, 1.0])], vec![]).unwrap();
        let out = correct(&p, &u, &d, &basis, &[1], 0.3, &SolverConfig::default()).unwrap();
        assert!(out.newton_iters <= 1);
        assert!(out.c.iter().all(|&c| c.abs() < 1e-15));
        assert!((out.u_t - (u + d * 0.3)).norm() < 1e-15);
    }

    #[test]
    fn zero_step_is_identity() {
        let p = circle();
        let u = v(&[1.0, 1.0]);
        let basis = ConeBasis::new(2, vec![u.clone() * 2.0], vec![]).unwrap();
        let out = correct(&p, &u, &v(&[-1.0, 1.0]), &basis, &[1], 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(out.newton_iters, 0);
        assert_eq!(out.c, v(&[0.0]));
        assert_eq!(out.u_t, u);
    }

    #[test]
    fn returns_to_the_circle() {
        let p = circle();
        let cfg = SolverConfig::default();
        for theta in [0.3f64, 1.1, 2.5, 4.0, 5.5] {
            let u = v(&[2f64.sqrt() * theta.cos(), 2f64.sqrt() * theta.sin()]);
            let tangent = v(&[-u[1], u[0]]);
            let basis = ConeBasis::new(2, vec![u.clone() * 2.0], vec![]).unwrap();
            for t in [0.1, 0.01] {
                let out = correct(&p, &u, &tangent, &basis, &[1], t, &cfg).unwrap();
                assert!((out.u_t.norm_squared() - 2.0).abs() <= cfg.newton_tol);
                let offset = &out.u_t - &u - &tangent * t;
                assert!((offset.clone() - &basis.edges()[0] * out.c[0]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn probe_decays_and_handles_empty_list() {
        let p = circle();
        let u = v(&[1.0, 1.0]);
        let basis = ConeBasis::new(2, vec![u.clone() * 2.0], vec![]).unwrap();
        let cfg = SolverConfig::default();
        assert!(superlinearity_probe(&p, &u, &v(&[-1.0, 1.0]), &basis, &[1], &[], &cfg).unwrap().is_empty());
        let r = superlinearity_probe(&p, &u, &v(&[-1.0, 1.0]), &basis, &[1], &[1e-2, 1e-3, 1e-4], &cfg).unwrap();
        assert!(r[1].1 <= 0.2 * r[0].1 && r[2].1 <= 0.2 * r[1].1);

        let lin = halfplane();
        let lb = ConeBasis::new(2, vec![v(&[1.0, 1.0])], vec![]).unwrap();
        let r = superlinearity_probe(&lin, &v(&[0.5, 0.5]), &v(&[-1.0, 1.0]), &lb, &[1], &[1e-2, 1e-3], &cfg).unwrap();
        assert!(r.iter().all(|&(_, ratio)| ratio == 0.0));
    }

    #[test]
    fn newton_cap_is_reported() {
        let p = circle();
        let u = v(&[1.0, 1.0]);
        let basis = ConeBasis::new(2, vec![u.clone() * 2.0], vec![]).unwrap();
        let cfg = SolverConfig { newton_max_iter: 1, newton_tol: 1e-15, ..Default::default() };
        let err = correct(&p, &u, &v(&[-1.0, 1.0]), &basis, &[1], 0.5, &cfg).unwrap_err();
        assert!(matches!(err, Error::NewtonStall { iterations: 1, .. }));
    }
}
