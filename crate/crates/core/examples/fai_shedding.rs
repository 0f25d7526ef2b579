//! False active indices: an active constraint that the descent direction
//! leaves is dropped from the working set, so the step is not corrected onto
//! it and the iterate moves into the interior.

use csdm::problems::builtin;
use csdm::working_set::{active_set, csdd};
use csdm::{solve, SolverConfig, Vector};

fn main() {
    let cfg = SolverConfig::default();
    for (name, start) in [("rosenbrock-disk", [1.0, -1.0]), ("mishra-bird", [-1.0, -8.0])] {
        let problem = builtin(name).unwrap();
        let u = Vector::from_row_slice(&start);
        let active = active_set(&problem, &u, cfg.active_tol).unwrap();
        let mut bundle = csdd(&problem, &u, &active, &cfg.projection).unwrap();
        bundle.classify(cfg.wis_rel_tol).unwrap();
        println!("{name} at {start:?}");
        println!("  I_A = {:?}, I_W = {:?}, false active = {:?}", bundle.active, bundle.working, bundle.fai);
        for (i, g) in bundle.active.iter().zip(&bundle.active_gradients) {
            println!("  <g'_{i}, d> = {:+.3e}", g.dot(&bundle.d));
        }
        let report = solve(&problem, &u, &cfg).unwrap();
        let sets: Vec<String> = report.trace.iter().take(4).map(|r| format!("{:?}", r.active)).collect();
        println!("  active sets: {} ...; final u = {:.4?}\n", sets.join(" -> "), report.final_u.as_slice());
    }
}
