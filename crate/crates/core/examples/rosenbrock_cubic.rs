//! Rosenbrock's function under a cubic and a linear constraint, from two starts.
//!
//! From (0.5, 1.5) the iterates slide along g2 = 0 to the doubly active
//! optimum (1, 1). From (0, 0) they stay on g1 = 0 and stop at a KKT point
//! close to the origin.

use csdm::problems::builtin;
use csdm::{solve, SolverConfig, Vector};

fn main() {
    let problem = builtin("rosenbrock-cubic").unwrap();
    for start in [[0.5, 1.5], [0.0, 0.0]] {
        let report = solve(&problem, &Vector::from_row_slice(&start), &SolverConfig::default()).unwrap();
        println!("start {start:?}: {} after {} iterations", report.status.as_str(), report.iterations());
        for rec in report.trace.iter().take(6).chain(report.trace.last()) {
            println!(
                "  k={:<4} u=({:.4}, {:.4})  J={:.4}  |d|={:.2e}  I_A={:?}  I_W={:?}",
                rec.k, rec.u[0], rec.u[1], rec.j, rec.d_norm, rec.active, rec.working
            );
        }
    }
}
