//! An equality together with an inequality: the nearest point to (2, 1) on the
//! unit circle with u2 <= 0.3. Iterates follow the circle, and the final
//! multipliers certify the KKT conditions.

use csdm::problems::builtin;
use csdm::{solve, FnId, SolverConfig};

fn main() {
    let problem = builtin("circle-mixed").unwrap();
    let start = problem.default_start().unwrap().clone();
    let report = solve(&problem, &start, &SolverConfig::default()).unwrap();
    for rec in &report.trace {
        let h = problem.eval(FnId::Equality(1), &rec.u).unwrap();
        println!("k={} u=({:.6}, {:.6}) J={:.6} h={:+.1e} I_A={:?}", rec.k, rec.u[0], rec.u[1], rec.j, h, rec.active);
    }
    println!(
        "{}: mu = {:.4?} on {:?}, lambda = {:.4?}",
        report.status.as_str(),
        report.multipliers_mu,
        report.final_active,
        report.multipliers_lambda
    );
    println!("expected u = ({:.6}, 0.3)", 0.91f64.sqrt());
}
