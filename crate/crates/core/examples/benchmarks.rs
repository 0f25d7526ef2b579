//! Runs every built-in problem from its published or documented start and
//! prints a summary row per run.

use csdm::problems::{builtin, gomez_levy_start};
use csdm::{solve, SolverConfig, Vector};

fn main() {
    let starts: Vec<(&str, Vec<f64>)> = vec![
        ("rosenbrock-cubic", vec![0.5, 1.5]),
        ("rosenbrock-cubic", vec![0.0, 0.0]),
        ("rosenbrock-cubic", vec![0.0, 1.0]),
        ("rosenbrock-disk", vec![1.0, -1.0]),
        ("rosenbrock-disk", vec![1.25, 7f64.sqrt() / 4.0]),
        ("mishra-bird", vec![-5.0, 0.0]),
        ("mishra-bird", vec![-1.0, -8.0]),
        ("gomez-levy", gomez_levy_start().iter().copied().collect()),
    ];
    println!("{:<18} {:<20} {:<10} {:>5}  {:<20} {:>10}", "problem", "start", "status", "k", "u", "J");
    for (name, start) in starts {
        let problem = builtin(name).unwrap();
        let report = solve(&problem, &Vector::from_vec(start.clone()), &SolverConfig::default()).unwrap();
        let fmt = |xs: &[f64]| format!("({})", xs.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", "));
        println!(
            "{:<18} {:<20} {:<10} {:>5}  {:<20} {:>10.4}",
            name,
            fmt(&start),
            report.status.as_str(),
            report.iterations(),
            fmt(report.final_u.as_slice()),
            report.final_j
        );
    }
}
