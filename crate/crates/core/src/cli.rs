//! Command-line front end.
//!
//! Exit codes: 0 success, 2 solver or check failure, 3 infeasible start,
//! 4 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::SolverConfig;
use crate::fuzz::fuzz_projection;
use crate::gradcheck::{gradcheck, GradcheckOptions};
use crate::oracle::MAX_ORACLE_EDGES;
use crate::problem::{check_feasibility, Feasibility, Problem, Vector};
use crate::problems::{builtin, describe, parse_problem, BUILTIN_NAMES};
use crate::solver::{solve, SolveReport, SolveStatus};
use crate::trace::write_trace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "csdm", version, about = "Correctable steepest descent for smooth constrained minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the solver and print a summary.
    Solve(SolveArgs),
    /// List the built-in problems.
    List,
    /// Check analytic gradients against central differences.
    Gradcheck(GradcheckArgs),
    /// Compare the iterative cone projection with the enumeration oracle.
    FuzzProjection(FuzzArgs),
    /// Check a problem definition and the feasibility of its start point.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Selector {
    /// Built-in problem name (see `list`).
    #[arg(long)]
    problem: Option<String>,
    /// Problem file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    selector: Selector,
    /// Start point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Step along d / max(1, |d|).
    #[arg(long)]
    normalize: bool,
    /// Write the iterate trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    #[command(flatten)]
    selector: Selector,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 6)]
    max_dim: usize,
    #[arg(long, default_value_t = 6)]
    max_edges: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    selector: Selector,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn failure(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_FAILURE, message: message.into() }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::List => cmd_list(out),
        Command::Gradcheck(a) => cmd_gradcheck(a, out),
        Command::FuzzProjection(a) => cmd_fuzz(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_problem(sel: &Selector) -> Result<Problem, Failure> {
    if let Some(name) = &sel.problem {
        return builtin(name).map_err(|e| usage(e.to_string()));
    }
    let path = sel.file.as_ref().expect("clap enforces one selector");
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let name = Path::new(path).file_stem().map_or("file".into(), |s| s.to_string_lossy().into_owned());
    parse_problem(&text).map(|p| p.with_name(name)).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_start(text: &str, dim: usize) -> Result<Vector, Failure> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("malformed start value '{}'", s.trim()))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != dim {
        return Err(usage(format!("start has {} values but the problem has dimension {dim}", values.len())));
    }
    Ok(Vector::from_vec(values))
}

fn resolve_start(problem: &Problem, start: Option<&str>) -> Result<Vector, Failure> {
    match start {
        Some(s) => parse_start(s, problem.dim()),
        None => problem.default_start().cloned().ok_or_else(|| usage("the problem has no default start; pass --start")),
    }
}

fn fmt_vec(u: &Vector) -> String {
    let parts: Vec<String> = u.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn fmt_set(s: &[usize]) -> String {
    if s.is_empty() {
        "{}".into()
    } else {
        format!("{{{}}}", s.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
    }
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    problem: &'a str,
    status: SolveStatus,
    iterations: usize,
    final_u: Vec<f64>,
    final_j: f64,
    final_d_norm: f64,
    final_active: &'a [usize],
    multipliers_mu: &'a [f64],
    multipliers_lambda: &'a [f64],
    set_changes: Vec<SetChange>,
    violations: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct SetChange {
    k: usize,
    active: Vec<usize>,
    working: Vec<usize>,
}

/// Iterations where `I_A` or `I_W` differ from the previous iterate, plus the last one.
fn set_changes(report: &SolveReport) -> Vec<SetChange> {
    let mut out: Vec<SetChange> = Vec::new();
    for (i, r) in report.trace.iter().enumerate() {
        let changed = out.last().is_none_or(|c| c.active != r.active || c.working != r.working);
        if changed || i + 1 == report.trace.len() {
            out.push(SetChange { k: r.k, active: r.active.clone(), working: r.working.clone() });
        }
    }
    out
}

fn status_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::InfeasibleStart => EXIT_INFEASIBLE,
        SolveStatus::MaxIterations | SolveStatus::Stalled | SolveStatus::LicqFailure => EXIT_FAILURE,
    }
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let problem = load_problem(&a.selector)?;
    let u0 = resolve_start(&problem, a.start.as_deref())?;
    let mut cfg = SolverConfig::default();
    if let Some(eps) = a.eps {
        cfg.eps = eps;
    }
    if let Some(tau) = a.tau {
        cfg.tau = tau;
    }
    if let Some(m) = a.max_iter {
        cfg.max_outer_iter = m;
    }
    cfg.normalize_direction = a.normalize;
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let report = solve(&problem, &u0, &cfg).map_err(|e| failure(e.to_string()))?;
    if let Some(path) = &a.trace {
        let file = fs::File::create(path).map_err(|e| failure(format!("{}: {e}", path.display())))?;
        write_trace(std::io::BufWriter::new(file), problem.dim(), &report.trace).map_err(|e| failure(format!("{}: {e}", path.display())))?;
    }

    let summary = SolveSummary {
        problem: problem.name(),
        status: report.status,
        iterations: report.iterations(),
        final_u: report.final_u.iter().copied().collect(),
        final_j: report.final_j,
        final_d_norm: report.final_d_norm,
        final_active: &report.final_active,
        multipliers_mu: &report.multipliers_mu,
        multipliers_lambda: &report.multipliers_lambda,
        set_changes: set_changes(&report),
        violations: report.violations.iter().map(|(id, v)| (id.to_string(), *v)).collect(),
    };
    let io = |e: std::io::Error| failure(e.to_string());
    match a.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("serializable")).map_err(io)?,
        Format::Table => {
            writeln!(out, "problem   {}", summary.problem).map_err(io)?;
            writeln!(out, "status    {}", report.status.as_str()).map_err(io)?;
            if report.status == SolveStatus::InfeasibleStart {
                for (id, v) in &summary.violations {
                    writeln!(out, "violated  {id} = {v:.4}").map_err(io)?;
                }
            } else {
                writeln!(out, "k         {}", summary.iterations).map_err(io)?;
                writeln!(out, "u         {}", fmt_vec(&report.final_u)).map_err(io)?;
                writeln!(out, "J         {:.4}", report.final_j).map_err(io)?;
                writeln!(out, "|d|       {:.4e}", report.final_d_norm).map_err(io)?;
                writeln!(out, "I_A       {}", fmt_set(&report.final_active)).map_err(io)?;
                writeln!(out).map_err(io)?;
                writeln!(out, "{:>6}  {:<16} {:<16}", "k", "I_A", "I_W").map_err(io)?;
                for c in &summary.set_changes {
                    writeln!(out, "{:>6}  {:<16} {:<16}", c.k, fmt_set(&c.active), fmt_set(&c.working)).map_err(io)?;
                }
            }
        }
    }
    Ok(status_code(report.status))
}

fn cmd_list(out: &mut dyn Write) -> Result<i32, Failure> {
    for name in BUILTIN_NAMES {
        writeln!(out, "{name:<20} {}", describe(name).unwrap_or("")).map_err(|e| failure(e.to_string()))?;
    }
    Ok(EXIT_OK)
}

fn cmd_gradcheck(a: GradcheckArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let problem = load_problem(&a.selector)?;
    let opts = GradcheckOptions { samples: a.samples, seed: a.seed, ..Default::default() };
    let report = gradcheck(&problem, &opts).map_err(|e| failure(e.to_string()))?;
    let io = |e: std::io::Error| failure(e.to_string());
    match a.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")).map_err(io)?,
        Format::Table => {
            writeln!(out, "problem {} ({} samples, h = {:e})", report.problem, opts.samples, opts.h).map_err(io)?;
            for e in &report.entries {
                let verdict = if e.max_rel_error <= opts.tol { "ok" } else { "FAIL" };
                writeln!(out, "{:<6} {:.3e}  {verdict}", e.function.to_string(), e.max_rel_error).map_err(io)?;
            }
        }
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_fuzz(a: FuzzArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.max_edges > MAX_ORACLE_EDGES {
        return Err(usage(format!("--max-edges must be at most {MAX_ORACLE_EDGES}")));
    }
    if a.max_dim == 0 || a.max_edges == 0 {
        return Err(usage("--max-dim and --max-edges must be positive"));
    }
    let report = fuzz_projection(a.count, a.max_dim, a.max_edges, a.seed, &Default::default()).map_err(|e| failure(e.to_string()))?;
    let io = |e: std::io::Error| failure(e.to_string());
    match a.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")).map_err(io)?,
        Format::Table => {
            writeln!(out, "instances        {}", report.count).map_err(io)?;
            writeln!(out, "redrawn          {}", report.redrawn).map_err(io)?;
            writeln!(out, "max point diff   {:.3e}", report.max_point_discrepancy).map_err(io)?;
            writeln!(out, "max coeff diff   {:.3e}", report.max_coeff_discrepancy).map_err(io)?;
            writeln!(out, "{}", if report.passed() { "PASS" } else { "FAIL" }).map_err(io)?;
        }
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let problem = load_problem(&a.selector)?;
    let u0 = resolve_start(&problem, a.start.as_deref())?;
    let cfg = SolverConfig::default();
    let io = |e: std::io::Error| failure(e.to_string());
    writeln!(
        out,
        "problem {}: n = {}, {} inequalities, {} equalities",
        problem.name(),
        problem.dim(),
        problem.num_inequalities(),
        problem.num_equalities()
    )
    .map_err(io)?;
    let verdict = check_feasibility(&problem, &u0, cfg.feas_tol, cfg.active_tol).map_err(|e| failure(e.to_string()))?;
    problem.objective_value(&u0).map_err(|e| failure(e.to_string()))?;
    writeln!(out, "start {}", fmt_vec(&u0)).map_err(io)?;
    match verdict {
        Feasibility::Interior => writeln!(out, "interior").map_err(io)?,
        Feasibility::OnBoundary(active) => writeln!(out, "on boundary, active {}", fmt_set(&active)).map_err(io)?,
        Feasibility::Infeasible(v) => {
            for (id, val) in v {
                writeln!(out, "violated {id} = {val:.4}").map_err(io)?;
            }
            return Ok(EXIT_INFEASIBLE);
        }
    }
    Ok(EXIT_OK)
}
