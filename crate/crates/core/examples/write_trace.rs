//! Writes the iterate trace of a solve as CSV to stdout, or to the path given
//! as the first argument.

use std::fs::File;
use std::io::{self, BufWriter};

use csdm::problems::builtin;
use csdm::trace::write_trace;
use csdm::{solve, SolverConfig};

fn main() -> io::Result<()> {
    let problem = builtin("mishra-bird").unwrap();
    let start = problem.default_start().unwrap().clone();
    let report = solve(&problem, &start, &SolverConfig::default()).unwrap();
    match std::env::args().nth(1) {
        Some(path) => write_trace(BufWriter::new(File::create(path)?), problem.dim(), &report.trace),
        None => write_trace(io::stdout().lock(), problem.dim(), &report.trace),
    }
}
