//! Line-oriented problem files.
//!
//! ```text
//! dim 2
//! objective (1 - x1)^2 + 100*(x2 - x1^2)^2
//! ineq (x1 - 1)^3 - x2 + 1     # means expr <= 0
//! ineq x1 + x2 - 2
//! eq   <expr>                  # means expr = 0, zero or more
//! start 0.5 1.5                # optional
//! ```
//!
//! `#` starts a comment. `dim` must precede every expression line.

use super::expr::{ad_gradient, parse_expr, Expr};
use crate::error::ParseError;
use crate::problem::{Function, Problem, ScalarField, Vector};

/// Expression-backed field; gradients come from forward-mode AD and domain
/// errors surface as NaN, which the problem layer reports as evaluation errors.
#[derive(Debug, Clone)]
pub struct ExprField {
    expr: Expr,
    dim: usize,
}

impl ExprField {
    pub fn new(expr: Expr, dim: usize) -> Self {
        assert!(expr.arity() <= dim);
        ExprField { expr, dim }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl ScalarField for ExprField {
    fn value(&self, u: &Vector) -> f64 {
        self.expr.eval(u).unwrap_or(f64::NAN)
    }

    fn gradient(&self, u: &Vector) -> Vector {
        match ad_gradient(&self.expr, u) {
            Ok((_, g)) => g,
            Err(_) => Vector::from_element(self.dim, f64::NAN),
        }
    }

    fn is_affine(&self) -> bool {
        self.expr.is_affine()
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

/// Reads a problem file. The problem is named `"parsed"`; callers usually rename it.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut dim: Option<usize> = None;
    let mut objective: Option<Expr> = None;
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    let mut start: Option<Vector> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed_start = content.len() - content.trim_start().len();
        let content = content.trim_end();
        if content.trim().is_empty() {
            continue;
        }
        let body = &content[trimmed_start..];
        let kw_len = body.find(char::is_whitespace).unwrap_or(body.len());
        let keyword = &body[..kw_len];
        let rest = &body[kw_len..];
        // Column offset (in chars) of `rest` within the raw line.
        let rest_offset = raw[..trimmed_start + kw_len].chars().count();
        let kw_col = raw[..trimmed_start].chars().count() + 1;

        match keyword {
            "dim" => {
                if dim.is_some() {
                    return Err(err(line_no, kw_col, "duplicate 'dim' declaration"));
                }
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| err(line_no, rest_offset + 2, format!("'dim' needs a positive integer, found '{}'", rest.trim())))?;
                dim = Some(n);
            }
            "objective" | "ineq" | "eq" => {
                let n = dim.ok_or_else(|| err(line_no, kw_col, "'dim' must be declared before expressions"))?;
                if rest.trim().is_empty() {
                    return Err(err(line_no, rest_offset + 1, format!("'{keyword}' needs an expression")));
                }
                let e = parse_expr(rest, n, line_no, rest_offset)?;
                match keyword {
                    "objective" if objective.is_some() => return Err(err(line_no, kw_col, "duplicate objective")),
                    "objective" => objective = Some(e),
                    "ineq" => ineqs.push(e),
                    _ => eqs.push(e),
                }
            }
            "start" => {
                let n = dim.ok_or_else(|| err(line_no, kw_col, "'dim' must be declared before 'start'"))?;
                let values = rest
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|_| err(line_no, kw_col, format!("malformed start value '{s}'"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if values.len() != n {
                    return Err(err(line_no, kw_col, format!("dimension mismatch: start has {} values but dim is {n}", values.len())));
                }
                start = Some(Vector::from_vec(values));
            }
            other => return Err(err(line_no, kw_col, format!("unknown directive '{other}'"))),
        }
    }

    let dim = dim.ok_or_else(|| err(last_line.max(1), 1, "missing 'dim' declaration"))?;
    let objective = objective.ok_or_else(|| err(last_line.max(1), 1, "missing 'objective'"))?;
    let field = |e: Expr| Function::from_field(ExprField::new(e, dim));

    let mut problem = Problem::new("parsed", dim, field(objective));
    for e in ineqs {
        problem = problem.with_inequality(field(e));
    }
    for e in eqs {
        problem = problem.with_equality(field(e));
    }
    if let Some(s) = start {
        let bounds = s.iter().map(|&x| (x - 1.0, x + 1.0)).collect();
        problem = problem.with_start(s).with_sample_box(bounds);
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROSENBROCK_CUBIC: &str = "\
# constrained Rosenbrock
dim 2
objective (1 - x1)^2 + 100*(x2 - x1^2)^2
ineq (x1 - 1)^3 - x2 + 1
ineq x1 + x2 - 2
start 0.5 1.5
";

    #[test]
    fn reads_a_full_problem() {
        let p = parse_problem(ROSENBROCK_CUBIC).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.num_inequalities(), 2);
        assert_eq!(p.num_equalities(), 0);
        assert_eq!(p.default_start().unwrap(), &Vector::from_vec(vec![0.5, 1.5]));
        let one = Vector::from_vec(vec![1.0, 1.0]);
        assert_eq!(p.objective().value(&one), 0.0);
        assert_eq!(p.inequalities()[0].value(&one), 0.0);
        assert!(!p.inequalities()[0].is_affine());
        assert!(p.inequalities()[1].is_affine());
    }

    #[test]
    fn no_constraints_is_unconstrained() {
        let p = parse_problem("dim 3\nobjective x1^2 + x2^2 + x3^2\n").unwrap();
        assert_eq!(p.num_inequalities() + p.num_equalities(), 0);
    }

    #[test]
    fn parse_is_repeatable() {
        let a = parse_problem(ROSENBROCK_CUBIC).unwrap();
        let b = parse_problem(ROSENBROCK_CUBIC).unwrap();
        let u = Vector::from_vec(vec![0.3, -0.7]);
        assert_eq!(a.objective().value(&u), b.objective().value(&u));
        assert_eq!(a.objective().gradient(&u), b.objective().gradient(&u));
    }

    #[test]
    fn errors_point_at_the_source() {
        let e = parse_problem("dim 1\nobjective sin(").unwrap_err();
        assert_eq!((e.line, e.column), (2, 15));
        let e = parse_problem("dim 2\nobjective x1\nineq x3 - 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 6));
        let e = parse_problem("objective x1\n").unwrap_err();
        assert!(e.message.contains("'dim'"));
        let e = parse_problem("dim 2\nobjective x1\nstart 1 2 3\n").unwrap_err();
        assert!(e.message.contains("dimension mismatch"));
        let e = parse_problem("dim 2\n").unwrap_err();
        assert!(e.message.contains("objective"));
        assert!(parse_problem("dim 0\nobjective 1").is_err());
        assert!(parse_problem("dim 1\nminimize x1").is_err());
    }

    #[test]
    fn domain_errors_become_nan() {
        let p = parse_problem("dim 1\nobjective 1 / x1\n").unwrap();
        let zero = Vector::from_vec(vec![0.0]);
        assert!(p.objective().value(&zero).is_nan());
        assert!(p.objective_value(&zero).is_err());
    }
}
