//! Minimizing a convex quadratic over the nonnegative orthant with the
//! truncated-gradient scheme, then the same problem through the full solver.

use csdm::cone::orthant_qp_minimize;
use csdm::problems::orthant_quadratic;
use csdm::{solve, ProjectionConfig, SolverConfig, Vector};
use nalgebra::DMatrix;

fn main() {
    let g = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
    let xbar = Vector::from_vec(vec![1.0, -1.0, 0.5]);
    let x0 = Vector::from_element(3, 1.0);

    let sol = orthant_qp_minimize(&g, &xbar, &x0, &ProjectionConfig::default()).unwrap();
    println!("orthant scheme: x = {:.6?} after {} steps (face solve: {})", sol.x.as_slice(), sol.iterations, sol.face_solve);
    for (k, step) in sol.steps.iter().enumerate() {
        println!("  step {k}: alpha = {:.4}, |p|^2 = {:.3e}, decrease = {:.3e}, capped = {}", step.alpha, step.p_norm_sq, step.decrease, step.capped);
    }

    let problem = orthant_quadratic(g, xbar);
    let report = solve(&problem, &x0, &SolverConfig::default()).unwrap();
    println!("solver: {} x = {:.4?} active {:?}", report.status.as_str(), report.final_u.as_slice(), report.final_active);
}
