//! Benchmark problems with hand-coded gradients.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::problem::{Function, Problem, Vector};
use crate::solver::{transform_two_sided, TwoSided};

/// Names accepted by [`builtin`], in listing order.
pub const BUILTIN_NAMES: [&str; 6] =
    ["rosenbrock-cubic", "rosenbrock-disk", "mishra-bird", "gomez-levy", "orthant-quadratic", "circle-mixed"];

/// One-line description for listings.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "rosenbrock-cubic" => "Rosenbrock objective, cubic and linear constraints (n=2, m=2)",
        "rosenbrock-disk" => "Rosenbrock objective, disk plus two excluded disks (n=2, m=3)",
        "mishra-bird" => "Mishra's Bird on a disk intersected with a box (n=2, m=5)",
        "gomez-levy" => "Gomez-Levy objective with a sinusoidal constraint (n=2, m=7)",
        "orthant-quadratic" => "strictly convex quadratic over the nonnegative orthant (n=3, m=3)",
        "circle-mixed" => "distance to (2,1) on the unit circle below u2 = 0.3 (n=2, m=1, p=1)",
        _ => return None,
    })
}

/// Looks up a benchmark by name.
pub fn builtin(name: &str) -> Result<Problem> {
    match name {
        "rosenbrock-cubic" => Ok(rosenbrock_cubic()),
        "rosenbrock-disk" => Ok(rosenbrock_disk()),
        "mishra-bird" => Ok(mishra_bird()),
        "gomez-levy" => Ok(gomez_levy()),
        "orthant-quadratic" => Ok(default_orthant_quadratic()),
        "circle-mixed" => Ok(circle_mixed()),
        _ => Err(Error::NotFound { name: name.to_string(), known: BUILTIN_NAMES.iter().map(|s| s.to_string()).collect() }),
    }
}

fn v2(a: f64, b: f64) -> Vector {
    Vector::from_vec(vec![a, b])
}

fn rosenbrock() -> Function {
    Function::new(
        |u: &Vector| (1.0 - u[0]).powi(2) + 100.0 * (u[1] - u[0] * u[0]).powi(2),
        |u: &Vector| {
            let r = u[1] - u[0] * u[0];
            v2(-2.0 * (1.0 - u[0]) - 400.0 * u[0] * r, 200.0 * r)
        },
    )
}

pub fn rosenbrock_cubic() -> Problem {
    Problem::new("rosenbrock-cubic", 2, rosenbrock())
        .with_inequality(Function::new(
            |u: &Vector| (u[0] - 1.0).powi(3) - u[1] + 1.0,
            |u: &Vector| v2(3.0 * (u[0] - 1.0).powi(2), -1.0),
        ))
        .with_inequality(Function::affine(v2(1.0, 1.0), -2.0))
        .with_start(v2(0.5, 1.5))
        .with_sample_box(vec![(-1.5, 1.5), (-0.5, 2.5)])
}

pub fn rosenbrock_disk() -> Problem {
    Problem::new("rosenbrock-disk", 2, rosenbrock())
        .with_inequality(Function::new(|u: &Vector| u[0] * u[0] + u[1] * u[1] - 2.0, |u: &Vector| v2(2.0 * u[0], 2.0 * u[1])))
        .with_inequality(Function::new(
            |u: &Vector| 0.16 - (u[0] - 1.0).powi(2) - u[1] * u[1],
            |u: &Vector| v2(-2.0 * (u[0] - 1.0), -2.0 * u[1]),
        ))
        .with_inequality(Function::new(
            |u: &Vector| 1.0 - u[0] * u[0] - (u[1] - 2.0).powi(2),
            |u: &Vector| v2(-2.0 * u[0], -2.0 * (u[1] - 2.0)),
        ))
        .with_start(v2(1.0, -1.0))
        .with_sample_box(vec![(-1.5, 1.5), (-1.5, 1.5)])
}

pub fn mishra_bird() -> Problem {
    let objective = Function::new(
        |u: &Vector| {
            let a = (1.0 - u[0].cos()).powi(2);
            let b = (1.0 - u[1].sin()).powi(2);
            u[1].sin() * a.exp() + u[0].cos() * b.exp() + (u[0] - u[1]).powi(2)
        },
        |u: &Vector| {
            let (s1, c1) = u[0].sin_cos();
            let (s2, c2) = u[1].sin_cos();
            let ea = ((1.0 - c1).powi(2)).exp();
            let eb = ((1.0 - s2).powi(2)).exp();
            let diff = 2.0 * (u[0] - u[1]);
            v2(
                s2 * ea * 2.0 * (1.0 - c1) * s1 - s1 * eb + diff,
                c2 * ea - c1 * eb * 2.0 * (1.0 - s2) * c2 - diff,
            )
        },
    );
    let disk = Function::new(
        |u: &Vector| (u[0] + 5.0).powi(2) + (u[1] + 5.0).powi(2) - 25.0,
        |u: &Vector| v2(2.0 * (u[0] + 5.0), 2.0 * (u[1] + 5.0)),
    );
    let base = Problem::new("mishra-bird", 2, objective).with_inequality(disk);
    // One bound at a time keeps the numbering g2 = u1 + 1, g3 = -9 - u1, g4 = u2, g5 = -8 - u2.
    let coord = |k: usize| Function::affine(if k == 0 { v2(1.0, 0.0) } else { v2(0.0, 1.0) }, 0.0);
    let with_u1 = transform_two_sided(base, &[TwoSided { function: coord(0), lower: -9.0, upper: -1.0 }]).expect("valid bounds");
    transform_two_sided(with_u1, &[TwoSided { function: coord(1), lower: -8.0, upper: 0.0 }])
        .expect("valid bounds")
        .with_start(v2(-5.0, 0.0))
        .with_sample_box(vec![(-9.0, -1.0), (-8.0, 0.0)])
}

/// Feasible start used for the Gomez-Levy benchmark.
pub fn gomez_levy_start() -> Vector {
    v2(0.0, -1.0)
}

pub fn gomez_levy() -> Problem {
    let objective = Function::new(
        |u: &Vector| {
            let (x, y) = (u[0], u[1]);
            4.0 * x * x - 2.1 * x.powi(4) + x.powi(6) / 3.0 + x * y - 4.0 * y * y + 4.0 * y.powi(4)
        },
        |u: &Vector| {
            let (x, y) = (u[0], u[1]);
            v2(8.0 * x - 8.4 * x.powi(3) + 2.0 * x.powi(5) + y, x - 8.0 * y + 16.0 * y.powi(3))
        },
    );
    let wave = Function::new(
        |u: &Vector| -(4.0 * PI * u[0]).sin() + 2.0 * (2.0 * PI * u[1]).sin().powi(2) - 1.5,
        |u: &Vector| v2(-4.0 * PI * (4.0 * PI * u[0]).cos(), 4.0 * PI * (4.0 * PI * u[1]).sin()),
    );
    Problem::new("gomez-levy", 2, objective)
        .with_inequality(wave)
        .with_inequality(Function::affine(v2(-1.0, 0.0), -1.0))
        .with_inequality(Function::affine(v2(1.0, 0.0), -0.75))
        .with_inequality(Function::affine(v2(0.0, -1.0), -1.0))
        .with_inequality(Function::affine(v2(0.0, 1.0), -1.0))
        .with_inequality(Function::affine(v2(-1.0, 1.0), 0.0))
        .with_inequality(Function::new(|u: &Vector| u[0] * u[1], |u: &Vector| v2(u[1], u[0])))
        .with_start(gomez_levy_start())
        .with_sample_box(vec![(-1.0, 0.75), (-1.0, 1.0)])
}

/// `1/2 (x - xbar)' G (x - xbar)` subject to `-x_i <= 0`.
///
/// # Panics
/// If `g` is not square or its size differs from `xbar`.
pub fn orthant_quadratic(g: DMatrix<f64>, xbar: Vector) -> Problem {
    let n = xbar.len();
    assert!(g.is_square() && g.nrows() == n, "G must be n x n");
    let (g2, xbar2) = (g.clone(), xbar.clone());
    let objective = Function::new(
        move |x: &Vector| {
            let r = x - &xbar;
            0.5 * r.dot(&(&g * &r))
        },
        move |x: &Vector| &g2 * (x - &xbar2),
    );
    let mut p = Problem::new("orthant-quadratic", n, objective);
    for i in 0..n {
        let mut a = Vector::zeros(n);
        a[i] = -1.0;
        p = p.with_inequality(Function::affine(a, 0.0));
    }
    p.with_start(Vector::from_element(n, 1.0)).with_sample_box(vec![(0.0, 2.0); n])
}

fn default_orthant_quadratic() -> Problem {
    let g = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
    orthant_quadratic(g, Vector::from_vec(vec![1.0, -1.0, 0.5]))
}

pub fn circle_mixed() -> Problem {
    Problem::new(
        "circle-mixed",
        2,
        Function::new(|u: &Vector| (u[0] - 2.0).powi(2) + (u[1] - 1.0).powi(2), |u: &Vector| v2(2.0 * (u[0] - 2.0), 2.0 * (u[1] - 1.0))),
    )
    .with_inequality(Function::affine(v2(0.0, 1.0), -0.3))
    .with_equality(Function::new(|u: &Vector| u.norm_squared() - 1.0, |u: &Vector| u * 2.0))
    .with_start(v2(1.0, 0.0))
    .with_sample_box(vec![(-1.5, 1.5), (-1.5, 1.5)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_cubic_optimum_is_doubly_active() {
        let p = builtin("rosenbrock-cubic").unwrap();
        let one = v2(1.0, 1.0);
        assert_eq!(p.num_inequalities(), 2);
        assert_eq!(p.inequalities()[0].value(&one), 0.0);
        assert_eq!(p.inequalities()[1].value(&one), 0.0);
    }

    #[test]
    fn stated_optima_reproduce_stated_values() {
        let m = builtin("mishra-bird").unwrap();
        assert!((m.objective().value(&v2(-3.1302, -1.5821)) + 106.7645).abs() < 5e-4);
        let g = builtin("gomez-levy").unwrap();
        assert!((g.objective().value(&v2(0.0898, -0.7126)) + 1.0316).abs() < 5e-4);
    }

    #[test]
    fn mishra_numbering_matches_box_order() {
        let p = builtin("mishra-bird").unwrap();
        let u = v2(-2.0, -3.0);
        let g: Vec<f64> = p.inequalities().iter().map(|f| f.value(&u)).collect();
        assert_eq!(g[1..], [-1.0, -7.0, -3.0, -5.0]);
        assert!(p.inequalities()[1..].iter().all(Function::is_affine));
    }

    #[test]
    fn gomez_levy_printed_start_is_infeasible_and_replacement_is_not() {
        let p = builtin("gomez-levy").unwrap();
        assert_eq!(p.inequalities()[6].value(&v2(-1.0, -1.0)), 1.0);
        let s = gomez_levy_start();
        assert!(p.inequalities().iter().all(|g| g.value(&s) <= 0.0));
    }

    #[test]
    fn default_starts_are_feasible() {
        for name in BUILTIN_NAMES {
            let p = builtin(name).unwrap();
            let s = p.default_start().unwrap();
            assert!(p.inequalities().iter().all(|g| g.value(s) <= 1e-12), "{name}");
            assert!(p.equalities().iter().all(|h| h.value(s).abs() <= 1e-12), "{name}");
            assert!(describe(name).is_some());
        }
    }

    #[test]
    fn unknown_name_lists_known_ones() {
        match builtin("nope") {
            Err(Error::NotFound { known, .. }) => assert_eq!(known.len(), BUILTIN_NAMES.len()),
            other => panic!("{other:?}"),
        }
    }
}
