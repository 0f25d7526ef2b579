//! Reads a problem file (default `data/gomez_levy.prob`), checks its
//! automatically differentiated gradients and solves it.

use csdm::gradcheck::{gradcheck, GradcheckOptions};
use csdm::problems::parse_problem;
use csdm::{solve, SolverConfig};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/gomez_levy.prob").to_string());
    let text = std::fs::read_to_string(&path).expect("readable problem file");
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(4);
        }
    };
    println!("{path}: n = {}, m = {}, p = {}", problem.dim(), problem.num_inequalities(), problem.num_equalities());

    let check = gradcheck(&problem, &GradcheckOptions::default()).unwrap();
    println!("largest relative gradient error {:.2e}", check.max_error());

    let start = problem.default_start().expect("file declares a start").clone();
    let report = solve(&problem, &start, &SolverConfig::default()).unwrap();
    println!("{} after {} iterations: u = {:.4?}, J = {:.4}", report.status.as_str(), report.iterations(), report.final_u.as_slice(), report.final_j);
}
