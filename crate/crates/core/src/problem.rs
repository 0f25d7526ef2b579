//! Problem abstraction: objective, inequality constraints `g_i(u) <= 0` and
//! equality constraints `h_j(u) = 0` over `R^n`, each with a gradient.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, FnId, Result};

/// Dense point or direction in `R^n`.
pub type Vector = DVector<f64>;

/// Ascending list of 1-based constraint labels.
pub type IndexSet = Vec<usize>;

/// A C¹ scalar field with an exact gradient.
///
/// Implementations must be pure; the solver may call them from several
/// threads at once.
pub trait ScalarField: Send + Sync {
    fn value(&self, u: &Vector) -> f64;

    fn gradient(&self, u: &Vector) -> Vector;

    /// `true` when the field is affine in `u`, so its gradient is constant.
    fn is_affine(&self) -> bool {
        false
    }
}

struct ClosureField<V, G> {
    value: V,
    gradient: G,
    affine: bool,
}

impl<V, G> ScalarField for ClosureField<V, G>
where
    V: Fn(&Vector) -> f64 + Send + Sync,
    G: Fn(&Vector) -> Vector + Send + Sync,
{
    fn value(&self, u: &Vector) -> f64 {
        (self.value)(u)
    }

    fn gradient(&self, u: &Vector) -> Vector {
        (self.gradient)(u)
    }

    fn is_affine(&self) -> bool {
        self.affine
    }
}

/// Shared handle to an evaluator pair `(f, f')`.
#[derive(Clone)]
pub struct Function {
    field: Arc<dyn ScalarField>,
}

impl Function {
    pub fn new<V, G>(value: V, gradient: G) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        G: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        Self::from_field(ClosureField { value, gradient, affine: false })
    }

    /// Affine field `<a, u> + b`.
    pub fn affine(a: Vector, b: f64) -> Self {
        let grad = a.clone();
        Self::from_field(ClosureField {
            value: move |u: &Vector| a.dot(u) + b,
            gradient: move |_: &Vector| grad.clone(),
            affine: true,
        })
    }

    pub fn from_field<F: ScalarField + 'static>(field: F) -> Self {
        Function { field: Arc::new(field) }
    }

    pub fn value(&self, u: &Vector) -> f64 {
        self.field.value(u)
    }

    pub fn gradient(&self, u: &Vector) -> Vector {
        self.field.gradient(u)
    }

    pub fn is_affine(&self) -> bool {
        self.field.is_affine()
    }

    /// Negated field, `-f`. Affinity is preserved.
    pub fn negated(&self) -> Function {
        self.shifted(-1.0, 0.0)
    }

    /// `scale * f + offset`.
    pub fn shifted(&self, scale: f64, offset: f64) -> Function {
        let inner = Arc::clone(&self.field);
        let inner_grad = Arc::clone(&self.field);
        Self::from_field(ClosureField {
            value: move |u: &Vector| scale * inner.value(u) + offset,
            gradient: move |u: &Vector| inner_grad.gradient(u) * scale,
            affine: self.is_affine(),
        })
    }
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Function").field("affine", &self.is_affine()).finish()
    }
}

/// Minimize `J(u)` subject to `g_i(u) <= 0` (i = 1..m) and `h_j(u) = 0` (j = 1..p).
#[derive(Clone, Debug)]
pub struct Problem {
    name: String,
    dim: usize,
    objective: Function,
    inequalities: Vec<Function>,
    equalities: Vec<Function>,
    start: Option<Vector>,
    sample_box: Vec<(f64, f64)>,
}

impl Problem {
    pub fn new(name: impl Into<String>, dim: usize, objective: Function) -> Self {
        assert!(dim >= 1, "problem dimension must be positive");
        Problem {
            name: name.into(),
            dim,
            objective,
            inequalities: Vec::new(),
            equalities: Vec::new(),
            start: None,
            sample_box: vec![(-1.0, 1.0); dim],
        }
    }

    /// Appends `g_{m+1}(u) <= 0`.
    pub fn with_inequality(mut self, g: Function) -> Self {
        self.inequalities.push(g);
        self
    }

    /// Appends `h_{p+1}(u) = 0`.
    pub fn with_equality(mut self, h: Function) -> Self {
        self.equalities.push(h);
        self
    }

    pub fn with_start(mut self, start: Vector) -> Self {
        assert_eq!(start.len(), self.dim, "start has wrong dimension");
        self.start = Some(start);
        self
    }

    /// Box used for randomized checks (gradient validation, sampling).
    pub fn with_sample_box(mut self, bounds: Vec<(f64, f64)>) -> Self {
        assert_eq!(bounds.len(), self.dim, "sample box has wrong dimension");
        self.sample_box = bounds;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn objective(&self) -> &Function {
        &self.objective
    }

    pub fn inequalities(&self) -> &[Function] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[Function] {
        &self.equalities
    }

    pub fn num_inequalities(&self) -> usize {
        self.inequalities.len()
    }

    pub fn num_equalities(&self) -> usize {
        self.equalities.len()
    }

    pub fn default_start(&self) -> Option<&Vector> {
        self.start.as_ref()
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    /// Every evaluator of the problem, tagged by its identifier.
    pub fn functions(&self) -> impl Iterator<Item = (FnId, &Function)> {
        std::iter::once((FnId::Objective, &self.objective))
            .chain(self.inequalities.iter().enumerate().map(|(i, g)| (FnId::Inequality(i + 1), g)))
            .chain(self.equalities.iter().enumerate().map(|(j, h)| (FnId::Equality(j + 1), h)))
    }

    pub fn function(&self, id: FnId) -> &Function {
        match id {
            FnId::Objective => &self.objective,
            FnId::Inequality(i) => &self.inequalities[i - 1],
            FnId::Equality(j) => &self.equalities[j - 1],
        }
    }

    /// `true` when every constraint is affine.
    pub fn constraints_affine(&self) -> bool {
        self.inequalities.iter().chain(&self.equalities).all(Function::is_affine)
    }

    pub fn check_dim(&self, u: &Vector) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: u.len() });
        }
        Ok(())
    }

    /// Value of one evaluator; non-finite results become [`Error::Evaluation`].
    pub fn eval(&self, id: FnId, u: &Vector) -> Result<f64> {
        let v = self.function(id).value(u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { function: id, detail: format!("value {v} at {:?}", u.as_slice()) })
        }
    }

    /// Gradient of one evaluator, checked for dimension and finiteness.
    pub fn eval_gradient(&self, id: FnId, u: &Vector) -> Result<Vector> {
        let g = self.function(id).gradient(u);
        if g.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: g.len() });
        }
        if g.iter().all(|x| x.is_finite()) {
            Ok(g)
        } else {
            Err(Error::Evaluation { function: id, detail: format!("non-finite gradient at {:?}", u.as_slice()) })
        }
    }

    pub fn objective_value(&self, u: &Vector) -> Result<f64> {
        self.eval(FnId::Objective, u)
    }

    pub fn objective_gradient(&self, u: &Vector) -> Result<Vector> {
        self.eval_gradient(FnId::Objective, u)
    }

    /// `[g_1(u), ..., g_m(u)]`.
    pub fn inequality_values(&self, u: &Vector) -> Result<Vec<f64>> {
        (1..=self.num_inequalities()).map(|i| self.eval(FnId::Inequality(i), u)).collect()
    }

    /// `[h_1(u), ..., h_p(u)]`.
    pub fn equality_values(&self, u: &Vector) -> Result<Vec<f64>> {
        (1..=self.num_equalities()).map(|j| self.eval(FnId::Equality(j), u)).collect()
    }
}

/// Outcome of [`check_feasibility`].
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// Every inequality holds strictly and every equality holds within tolerance.
    Interior,
    /// Feasible, with the listed inequalities active.
    OnBoundary(IndexSet),
    /// Constraints violated beyond tolerance, with their values.
    Infeasible(Vec<(FnId, f64)>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, Feasibility::Infeasible(_))
    }
}

/// Classifies `u` against the feasible set.
///
/// An inequality is violated when `g_i(u) > active_tol`, an equality when
/// `|h_j(u)| > active_tol`. Otherwise inequalities with `|g_i(u)| <= active_tol`
/// are reported as active. Equalities never affect the interior/boundary verdict.
/// `feas_tol` must not exceed `active_tol`; every non-active inequality then
/// satisfies the strict margin `g_i(u) < -feas_tol`.
pub fn check_feasibility(problem: &Problem, u: &Vector, feas_tol: f64, active_tol: f64) -> Result<Feasibility> {
    problem.check_dim(u)?;
    debug_assert!(feas_tol <= active_tol);
    let g = problem.inequality_values(u)?;
    let h = problem.equality_values(u)?;

    let mut violations = Vec::new();
    for (i, &gi) in g.iter().enumerate() {
        if gi > active_tol {
            violations.push((FnId::Inequality(i + 1), gi));
        }
    }
    for (j, &hj) in h.iter().enumerate() {
        if hj.abs() > active_tol {
            violations.push((FnId::Equality(j + 1), hj));
        }
    }
    if !violations.is_empty() {
        return Ok(Feasibility::Infeasible(violations));
    }

    let active: IndexSet = g
        .iter()
        .enumerate()
        .filter(|(_, gi)| gi.abs() <= active_tol)
        .map(|(i, _)| i + 1)
        .collect();
    if active.is_empty() {
        Ok(Feasibility::Interior)
    } else {
        Ok(Feasibility::OnBoundary(active))
    }
}

/// Central-difference gradient `(f(u + h e_i) - f(u - h e_i)) / 2h`.
///
/// Test and validation oracle only; the solver always uses exact gradients.
pub fn finite_diff_gradient<F>(f: F, u: &Vector, h: f64) -> Result<Vector>
where
    F: Fn(&Vector) -> f64,
{
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut grad = Vector::zeros(u.len());
    let mut probe = u.clone();
    for i in 0..u.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let fp = f(&probe);
        probe[i] = orig - h;
        let fm = f(&probe);
        probe[i] = orig;
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::Evaluation {
                function: FnId::Objective,
                detail: format!("non-finite value while differencing coordinate {}", i + 1),
            });
        }
        grad[i] = (fp - fm) / (2.0 * h);
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> Problem {
        Problem::new("disk", 2, Function::new(|u: &Vector| u.norm_squared(), |u: &Vector| u * 2.0))
            .with_inequality(Function::new(|u: &Vector| u.norm_squared() - 1.0, |u: &Vector| u * 2.0))
            .with_inequality(Function::affine(Vector::from_vec(vec![1.0, 0.0]), -0.5))
    }

    #[test]
    fn interior_boundary_and_violation() {
        let p = disk();
        let v = check_feasibility(&p, &Vector::from_vec(vec![0.0, 0.0]), 1e-7, 1e-5).unwrap();
        assert_eq!(v, Feasibility::Interior);
        let v = check_feasibility(&p, &Vector::from_vec(vec![0.0, 1.0]), 1e-7, 1e-5).unwrap();
        assert_eq!(v, Feasibility::OnBoundary(vec![1]));
        let v = check_feasibility(&p, &Vector::from_vec(vec![2.0, 0.0]), 1e-7, 1e-5).unwrap();
        match v {
            Feasibility::Infeasible(list) => {
                let ids: Vec<_> = list.iter().map(|(id, _)| *id).collect();
                assert_eq!(ids, vec![FnId::Inequality(1), FnId::Inequality(2)]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_value_names_the_evaluator() {
        let p = disk().with_inequality(Function::new(|_: &Vector| f64::NAN, |u: &Vector| u.clone()));
        let err = check_feasibility(&p, &Vector::from_vec(vec![0.0, 0.0]), 1e-7, 1e-5).unwrap_err();
        assert!(matches!(err, Error::Evaluation { function: FnId::Inequality(3), .. }));
    }

    #[test]
    fn loosening_tolerance_never_shrinks_active_set() {
        let p = disk();
        let u = Vector::from_vec(vec![0.0, 0.99999]);
        let active = |tol| match check_feasibility(&p, &u, 1e-9, tol).unwrap() {
            Feasibility::OnBoundary(s) => s,
            _ => vec![],
        };
        let mut prev = active(1e-8);
        for tol in [1e-6, 1e-5, 1e-4, 1e-2, 1.0] {
            let next = active(tol);
            assert!(prev.iter().all(|i| next.contains(i)));
            prev = next;
        }
    }

    #[test]
    fn finite_differences_of_a_square() {
        let g = finite_diff_gradient(|u: &Vector| u[0] * u[0], &Vector::from_vec(vec![3.0]), 1e-5).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn dimension_is_checked() {
        let err = disk().objective_value(&Vector::zeros(2)).and(disk().check_dim(&Vector::zeros(3)));
        assert!(matches!(err, Err(Error::DimensionMismatch { expected: 2, found: 3 })));
    }
}
