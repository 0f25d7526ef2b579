//! Correctable steepest descent for smooth problems
//!
//! ```text
//! minimize J(u)  subject to  g_i(u) <= 0,  h_j(u) = 0
//! ```
//!
//! Each iteration projects `-J'(u)` onto the polar of the cone generated by the
//! active constraint gradients, drops active constraints the resulting
//! direction leaves, and pulls trial points back onto the remaining ones with a
//! Newton correction.

pub mod cli;
pub mod cone;
pub mod config;
pub mod correction;
pub mod error;
pub mod fuzz;
pub mod gradcheck;
pub mod oracle;
pub mod problem;
pub mod problems;
pub mod solver;
pub mod trace;
pub mod working_set;

pub use cone::{project_onto_cone, project_onto_generators, ConeBasis, ProjectionResult};
pub use config::{ProjectionConfig, SolverConfig};
pub use error::{Error, FnId, ParseError, Result};
pub use problem::{check_feasibility, Feasibility, Function, IndexSet, Problem, ScalarField, Vector};
pub use solver::{solve, IterateRecord, SolveReport, SolveStatus};
