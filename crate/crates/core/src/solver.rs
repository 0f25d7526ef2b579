//! The correctable steepest descent method.
//!
//! Each outer iteration
//! 1. collects the active set `I_A` at `u`,
//! 2. builds the direction `d`; `|d| < eps` stops with a KKT point,
//! 3. splits `I_A` into the working set and false active indices,
//! 4. backtracks from `tau` to a trial stepsize on the uncorrected step,
//! 5. and 6. corrects the step back onto the working constraints and backtracks
//!    from the trial stepsize until the corrected point is feasible and meets
//!    the descent rule `J(u(t)) - J(u) < -(t/2)|d|^2`.

use serde::Serialize;

use crate::config::SolverConfig;
use crate::correction::correct;
use crate::error::{Error, FnId, Result};
use crate::problem::{check_feasibility, Feasibility, Function, IndexSet, Problem, Vector};
use crate::working_set::{active_set, csdd, is_kkt, DirectionBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Stalled,
    InfeasibleStart,
    LicqFailure,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIterations => "MaxIterations",
            SolveStatus::Stalled => "Stalled",
            SolveStatus::InfeasibleStart => "InfeasibleStart",
            SolveStatus::LicqFailure => "LicqFailure",
        }
    }
}

/// State at one outer iteration.
///
/// `u`, `j`, `d_norm`, `active` and `working` belong to the `k`-th iterate;
/// `t` and `corrections` describe the step that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub u: Vector,
    pub j: f64,
    pub d_norm: f64,
    pub active: IndexSet,
    pub working: IndexSet,
    pub t: Option<f64>,
    pub corrections: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub final_u: Vector,
    pub final_j: f64,
    pub final_d_norm: f64,
    /// Active set at the final iterate; `multipliers_mu` is aligned with it.
    pub final_active: IndexSet,
    pub multipliers_mu: Vec<f64>,
    pub multipliers_lambda: Vec<f64>,
    pub trace: Vec<IterateRecord>,
    /// Constraint violations at the start point when `status` is `InfeasibleStart`.
    pub violations: Vec<(FnId, f64)>,
}

impl SolveReport {
    /// Number of accepted steps.
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.k)
    }
}

/// Direction actually stepped along, with the data needed for the descent rule.
#[derive(Debug, Clone)]
pub struct StepDirection {
    pub direction: Vector,
    pub d_norm: f64,
    /// `max(1, |d|)` when normalizing, otherwise `1`.
    pub scale: f64,
}

impl StepDirection {
    pub fn new(bundle: &DirectionBundle, normalize: bool) -> Self {
        if normalize {
            let scale = bundle.d_norm.max(1.0);
            StepDirection { direction: &bundle.d / scale, d_norm: bundle.d_norm, scale }
        } else {
            StepDirection { direction: bundle.d.clone(), d_norm: bundle.d_norm, scale: 1.0 }
        }
    }

    /// Required decrease `(t / 2 C) |d|^2` for stepsize `t`.
    pub fn margin(&self, t: f64) -> f64 {
        descent_margin(t, self.d_norm, self.scale)
    }
}

/// `(t / 2 scale) * d_norm^2`, the sufficient-decrease amount of the stepsize rule.
pub fn descent_margin(t: f64, d_norm: f64, scale: f64) -> f64 {
    0.5 * t * d_norm * d_norm / scale
}

#[derive(Debug, Clone)]
pub struct LineSearchResult {
    pub t: f64,
    pub u_next: Vector,
    pub j_next: f64,
    /// `t = tau * backtrack_factor^backtracks`.
    pub backtracks: usize,
    pub corrected: bool,
    pub corrections: Vec<f64>,
    pub newton_iters: usize,
}

fn trial_step(cfg: &SolverConfig, backtracks: usize) -> f64 {
    cfg.tau * cfg.backtrack_factor.powi(backtracks as i32)
}

/// Evaluation failures at a trial point just reject the trial.
fn soft<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Evaluation { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// First `t = tau * factor^j` whose uncorrected point `u + t d` meets the descent
/// rule and keeps every inactive constraint below `-feas_tol`.
///
/// Returns `None` when `max_backtracks` is exhausted.
pub fn precorrection_linesearch(
    problem: &Problem,
    u: &Vector,
    step: &StepDirection,
    active: &[usize],
    j_u: f64,
    cfg: &SolverConfig,
) -> Result<Option<LineSearchResult>> {
    'trials: for backtracks in 0..=cfg.max_backtracks {
        let t = trial_step(cfg, backtracks);
        let trial = u + &step.direction * t;
        for i in (1..=problem.num_inequalities()).filter(|i| !active.contains(i)) {
            match soft(problem.eval(FnId::Inequality(i), &trial))? {
                Some(g) if g < -cfg.feas_tol => {}
                _ => continue 'trials,
            }
        }
        let Some(j_trial) = soft(problem.objective_value(&trial))? else {
            continue;
        };
        if j_trial - j_u < -step.margin(t) {
            return Ok(Some(LineSearchResult {
                t,
                u_next: trial,
                j_next: j_trial,
                backtracks,
                corrected: false,
                corrections: vec![],
                newton_iters: 0,
            }));
        }
    }
    Ok(None)
}

/// Backtracks from the pre-correction stepsize until the corrected point is
/// feasible and meets the descent rule.
///
/// When every working constraint and equality is affine the correction is
/// identically zero and `u(t) = u + t d` is used directly. Newton failures and
/// singular Jacobians at a trial stepsize shrink `t`.
pub fn corrected_linesearch(
    problem: &Problem,
    u: &Vector,
    step: &StepDirection,
    bundle: &DirectionBundle,
    start_backtracks: usize,
    j_u: f64,
    cfg: &SolverConfig,
) -> Result<Option<LineSearchResult>> {
    let working = &bundle.working;
    let affine = working.iter().all(|&i| problem.function(FnId::Inequality(i)).is_affine())
        && problem.equalities().iter().all(Function::is_affine);
    let ncorr = working.len() + problem.num_equalities();
    let basis = if affine { None } else { Some(bundle.working_basis(&cfg.projection)?) };

    'trials: for backtracks in start_backtracks..=start_backtracks + cfg.max_backtracks {
        let t = trial_step(cfg, backtracks);
        let (u_t, c, newton_iters) = match &basis {
            None => (u + &step.direction * t, vec![0.0; ncorr], 0),
            Some(basis) => match correct(problem, u, &step.direction, basis, working, t, cfg) {
                Ok(out) => (out.u_t, out.c.iter().copied().collect(), out.newton_iters),
                Err(Error::NewtonStall { .. } | Error::LicqFailure { .. } | Error::Evaluation { .. }) => continue,
                Err(e) => return Err(e),
            },
        };
        for i in 1..=problem.num_inequalities() {
            let Some(g) = soft(problem.eval(FnId::Inequality(i), &u_t))? else {
                continue 'trials;
            };
            let ok = if bundle.active.contains(&i) { g <= cfg.active_tol } else { g < -cfg.feas_tol };
            if !ok {
                continue 'trials;
            }
        }
        for j in 1..=problem.num_equalities() {
            match soft(problem.eval(FnId::Equality(j), &u_t))? {
                Some(h) if h.abs() <= cfg.active_tol => {}
                _ => continue 'trials,
            }
        }
        let Some(j_t) = soft(problem.objective_value(&u_t))? else {
            continue;
        };
        if j_t - j_u < -step.margin(t) {
            return Ok(Some(LineSearchResult {
                t,
                u_next: u_t,
                j_next: j_t,
                backtracks,
                corrected: basis.is_some(),
                corrections: c,
                newton_iters,
            }));
        }
    }
    Ok(None)
}

/// Runs the method from the feasible point `u0`.
///
/// Infeasible starts are reported with [`SolveStatus::InfeasibleStart`] and no
/// iterations. Evaluation errors at accepted iterates and invalid
/// configurations are returned as `Err`.
pub fn solve(problem: &Problem, u0: &Vector, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    problem.check_dim(u0)?;

    if let Feasibility::Infeasible(violations) = check_feasibility(problem, u0, cfg.feas_tol, cfg.active_tol)? {
        let final_j = problem.objective_value(u0).unwrap_or(f64::NAN);
        return Ok(SolveReport {
            status: SolveStatus::InfeasibleStart,
            final_u: u0.clone(),
            final_j,
            final_d_norm: f64::NAN,
            final_active: vec![],
            multipliers_mu: vec![],
            multipliers_lambda: vec![],
            trace: vec![],
            violations,
        });
    }

    let mut u = u0.clone();
    let mut j_u = problem.objective_value(&u)?;
    let mut trace: Vec<IterateRecord> = Vec::new();
    let mut last_t = None;
    let mut last_c = Vec::new();

    let finish = |status, u: Vector, j, bundle: Option<&DirectionBundle>, trace| {
        let (d_norm, active, mu, lambda) = match bundle {
            Some(b) => (b.d_norm, b.active.clone(), b.mu.clone(), b.lambda.clone()),
            None => (f64::NAN, vec![], vec![], vec![]),
        };
        SolveReport {
            status,
            final_u: u,
            final_j: j,
            final_d_norm: d_norm,
            final_active: active,
            multipliers_mu: mu,
            multipliers_lambda: lambda,
            trace,
            violations: vec![],
        }
    };

    for k in 0.. {
        let active = active_set(problem, &u, cfg.active_tol)?;
        let mut bundle = match csdd(problem, &u, &active, &cfg.projection) {
            Ok(b) => b,
            Err(Error::LicqFailure { .. }) => {
                trace.push(IterateRecord {
                    k,
                    u: u.clone(),
                    j: j_u,
                    d_norm: f64::NAN,
                    active: active.clone(),
                    working: vec![],
                    t: last_t,
                    corrections: last_c,
                });
                let mut report = finish(SolveStatus::LicqFailure, u, j_u, None, trace);
                report.final_active = active;
                return Ok(report);
            }
            Err(e) => return Err(e),
        };

        if is_kkt(&bundle, cfg.eps) {
            trace.push(IterateRecord {
                k,
                u: u.clone(),
                j: j_u,
                d_norm: bundle.d_norm,
                active,
                working: vec![],
                t: last_t,
                corrections: last_c,
            });
            return Ok(finish(SolveStatus::Converged, u, j_u, Some(&bundle), trace));
        }

        bundle.classify(cfg.wis_rel_tol)?;
        trace.push(IterateRecord {
            k,
            u: u.clone(),
            j: j_u,
            d_norm: bundle.d_norm,
            active: bundle.active.clone(),
            working: bundle.working.clone(),
            t: last_t,
            corrections: std::mem::take(&mut last_c),
        });
        if k >= cfg.max_outer_iter {
            return Ok(finish(SolveStatus::MaxIterations, u, j_u, Some(&bundle), trace));
        }

        let step = StepDirection::new(&bundle, cfg.normalize_direction);
        let Some(pre) = precorrection_linesearch(problem, &u, &step, &bundle.active, j_u, cfg)? else {
            return Ok(finish(SolveStatus::Stalled, u, j_u, Some(&bundle), trace));
        };
        let post = match corrected_linesearch(problem, &u, &step, &bundle, pre.backtracks, j_u, cfg) {
            Ok(Some(post)) => post,
            Ok(None) => return Ok(finish(SolveStatus::Stalled, u, j_u, Some(&bundle), trace)),
            Err(Error::LicqFailure { .. }) => return Ok(finish(SolveStatus::LicqFailure, u, j_u, Some(&bundle), trace)),
            Err(e) => return Err(e),
        };
        u = post.u_next;
        j_u = post.j_next;
        last_t = Some(post.t);
        last_c = post.corrections;
    }
    unreachable!()
}

/// A constraint `lower <= g(u) <= upper`.
#[derive(Debug, Clone)]
pub struct TwoSided {
    pub function: Function,
    pub lower: f64,
    pub upper: f64,
}

/// Appends one-sided forms of two-sided constraints to `problem`.
///
/// For `m` bounds, the constraints `g_i - b_i <= 0` are appended first, then
/// `a_i - g_i <= 0`, so the constraint count grows by `2m`.
pub fn transform_two_sided(problem: Problem, bounds: &[TwoSided]) -> Result<Problem> {
    let base = problem.num_inequalities();
    for (k, b) in bounds.iter().enumerate() {
        if !(b.lower < b.upper) {
            return Err(Error::InvalidBounds { index: base + k + 1, lower: b.lower, upper: b.upper });
        }
    }
    let uppers: Vec<Function> = bounds.iter().map(|b| b.function.shifted(1.0, -b.upper)).collect();
    let lowers: Vec<Function> = bounds.iter().map(|b| b.function.shifted(-1.0, b.lower)).collect();
    Ok(uppers.into_iter().chain(lowers).fold(problem, Problem::with_inequality))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn quadratic(a: &[f64]) -> Problem {
        let a = v(a);
        let a2 = a.clone();
        Problem::new("quad", a.len(), Function::new(move |u: &Vector| 0.5 * (u - &a).norm_squared(), move |u: &Vector| u - &a2))
    }

    fn bundle_for(p: &Problem, u: &Vector) -> DirectionBundle {
        let mut b = csdd(p, u, &[], &Default::default()).unwrap();
        b.classify(1e-5).unwrap();
        b
    }

    #[test]
    fn unconstrained_quadratic_converges() {
        let p = quadratic(&[1.0, -2.0, 0.5]);
        let r = solve(&p, &Vector::zeros(3), &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.final_u - v(&[1.0, -2.0, 0.5])).norm() < 1e-4);
    }

    #[test]
    fn linear_objective_accepts_full_step() {
        let p = Problem::new("lin", 2, Function::affine(v(&[-1.0, 0.0]), 0.0));
        let u = v(&[0.0, 0.0]);
        let b = bundle_for(&p, &u);
        let step = StepDirection::new(&b, false);
        let r = precorrection_linesearch(&p, &u, &step, &[], 0.0, &SolverConfig::default()).unwrap().unwrap();
        assert_eq!(r.t, 1.0);
        assert_eq!(r.backtracks, 0);
    }

    #[test]
    fn quadratic_margin_forces_short_step() {
        // J(u + t d) - J(u) = -t|d|^2 + 10 t^2 |d|^2 with d = (1): the rule needs t < 1/20.
        let p = Problem::new("q", 1, Function::new(|u: &Vector| -u[0] + 10.0 * u[0] * u[0], |u: &Vector| v(&[-1.0 + 20.0 * u[0]])));
        let u = v(&[0.0]);
        let b = bundle_for(&p, &u);
        let step = StepDirection::new(&b, false);
        let r = precorrection_linesearch(&p, &u, &step, &[], 0.0, &SolverConfig::default()).unwrap().unwrap();
        assert_eq!(r.t, 1.0 / 32.0);
        assert_eq!(r.backtracks, 5);
    }

    #[test]
    fn infeasible_start_is_rejected_without_iterating() {
        let p = quadratic(&[0.0, 0.0]).with_inequality(Function::affine(v(&[1.0, 0.0]), -1.0));
        let r = solve(&p, &v(&[2.0, 0.0]), &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::InfeasibleStart);
        assert!(r.trace.is_empty());
        assert_eq!(r.violations[0].0, FnId::Inequality(1));
    }

    #[test]
    fn bound_constrained_quadratic_stops_on_the_bound() {
        let p = quadratic(&[2.0, 1.0]).with_inequality(Function::affine(v(&[1.0, 0.0]), -1.0));
        let r = solve(&p, &v(&[0.0, 0.0]), &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.final_u - v(&[1.0, 1.0])).norm() < 1e-4);
        assert_eq!(r.final_active, vec![1]);
        assert!((r.multipliers_mu[0] - 1.0).abs() < 1e-4);
        // all-affine constraints never correct
        assert!(r.trace.iter().flat_map(|rec| rec.corrections.iter()).all(|&c| c == 0.0));
    }

    #[test]
    fn max_iterations_is_reported() {
        let p = quadratic(&[1.0, 1.0]);
        let cfg = SolverConfig { max_outer_iter: 1, eps: 1e-12, tau: 0.1, ..Default::default() };
        let r = solve(&p, &v(&[0.0, 0.0]), &cfg).unwrap();
        assert_eq!(r.status, SolveStatus::MaxIterations);
        assert_eq!(r.iterations(), 1);
    }

    #[test]
    fn two_sided_bounds_split_into_upper_then_lower() {
        let u1 = Function::affine(v(&[1.0]), 0.0);
        let p = transform_two_sided(quadratic(&[0.0]), &[TwoSided { function: u1.clone(), lower: -1.0, upper: 1.0 }]).unwrap();
        assert_eq!(p.num_inequalities(), 2);
        let x = v(&[0.25]);
        assert_eq!(p.inequalities()[0].value(&x), 0.25 - 1.0);
        assert_eq!(p.inequalities()[1].value(&x), -1.0 - 0.25);
        assert_eq!(p.inequalities()[1].gradient(&x), v(&[-1.0]));
        assert!(p.inequalities().iter().all(Function::is_affine));

        let err = transform_two_sided(quadratic(&[0.0]), &[TwoSided { function: u1, lower: 1.0, upper: 1.0 }]).unwrap_err();
        assert!(matches!(err, Error::InvalidBounds { index: 1, .. }));
    }

    #[test]
    fn normalized_direction_has_unit_or_smaller_norm() {
        let p = quadratic(&[10.0, 0.0]);
        let b = bundle_for(&p, &v(&[0.0, 0.0]));
        let s = StepDirection::new(&b, true);
        assert!((s.direction.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.scale, 10.0);
        let cfg = SolverConfig { normalize_direction: true, ..Default::default() };
        let r = solve(&p, &v(&[0.0, 0.0]), &cfg).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
    }
}
