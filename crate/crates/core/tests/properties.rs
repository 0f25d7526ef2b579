mod common;

use common::{run, v};
use csdm::oracle::oracle_project_subset_enumeration;
use csdm::problems::parse_problem;
use csdm::trace::{parse_trace, trace_to_string};
use csdm::{project_onto_cone, ConeBasis, ProjectionConfig, Vector};
use proptest::prelude::*;

fn vector(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-5.0f64..5.0, dim).prop_map(Vector::from_vec)
}

/// A conditioned basis in `R^dim` plus two vectors to project.
fn instance() -> impl Strategy<Value = (ConeBasis, Vector, Vector)> {
    (1usize..=5)
        .prop_flat_map(|dim| {
            let free = 0..=(dim - 1).min(2);
            (Just(dim), free)
        })
        .prop_flat_map(|(dim, nf)| {
            let ne = 1..=(dim - nf);
            (Just(dim), Just(nf), ne)
        })
        .prop_flat_map(|(dim, nf, ne)| {
            (
                prop::collection::vec(vector(dim), ne),
                prop::collection::vec(vector(dim), nf),
                vector(dim),
                vector(dim),
                Just(dim),
            )
        })
        .prop_filter_map("conditioned generators", |(edges, free, a, b, dim)| {
            let basis = ConeBasis::new(dim, edges, free).ok()?;
            (basis.rcond() > 1e-6).then_some((basis, a, b))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn projection_is_idempotent((basis, a, _) in instance()) {
        let cfg = ProjectionConfig::default();
        let p = project_onto_cone(&basis, &a, &cfg).unwrap();
        let pp = project_onto_cone(&basis, &p.point, &cfg).unwrap();
        prop_assert!((&pp.point - &p.point).norm() <= 1e-8 * a.norm().max(1.0));
    }

    #[test]
    fn projection_is_nonexpansive((basis, a, b) in instance()) {
        let cfg = ProjectionConfig::default();
        let pa = project_onto_cone(&basis, &a, &cfg).unwrap().point;
        let pb = project_onto_cone(&basis, &b, &cfg).unwrap().point;
        prop_assert!((&pa - &pb).norm() <= (&a - &b).norm() + 1e-8);
    }

    #[test]
    fn projection_matches_oracle_and_multipliers_are_feasible((basis, a, _) in instance()) {
        let cfg = ProjectionConfig::default();
        let p = project_onto_cone(&basis, &a, &cfg).unwrap();
        let o = oracle_project_subset_enumeration(&basis, &a).unwrap();
        prop_assert!((&p.point - &o.point).norm() <= 1e-7 * a.norm().max(1.0));
        prop_assert!(p.mu.iter().all(|&m| m >= 0.0));
        for e in basis.edges() {
            prop_assert!(p.residual.dot(e) <= 1e-8 * a.norm().max(1.0) * e.norm().max(1.0));
        }
        for f in basis.free() {
            prop_assert!(p.residual.dot(f).abs() <= 1e-8 * a.norm().max(1.0) * f.norm().max(1.0));
        }
    }

    #[test]
    fn positive_scaling_commutes((basis, a, _) in instance(), s in 0.01f64..100.0) {
        let cfg = ProjectionConfig::default();
        let p = project_onto_cone(&basis, &a, &cfg).unwrap().point;
        let ps = project_onto_cone(&basis, &(&a * s), &cfg).unwrap().point;
        prop_assert!((&ps - &p * s).norm() <= 1e-8 * s.max(1.0) * a.norm().max(1.0));
    }

    #[test]
    fn parsed_polynomials_evaluate_like_closed_form(c in -3.0f64..3.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let text = format!("dim 2\nobjective {c}*x1^3 - x1*x2 + exp(x2)/2\n");
        let p = parse_problem(&text).unwrap();
        let u = v(&[x, y]);
        let want = c * x.powi(3) - x * y + y.exp() / 2.0;
        let grad = v(&[3.0 * c * x * x - y, -x + y.exp() / 2.0]);
        prop_assert!((p.objective().value(&u) - want).abs() <= 1e-12 * want.abs().max(1.0));
        prop_assert!((p.objective().gradient(&u) - grad).amax() <= 1e-12 * 50.0);
    }
}

#[test]
fn solver_traces_round_trip_exactly() {
    for (name, start) in [("rosenbrock-disk", v(&[1.0, -1.0])), ("mishra-bird", v(&[-1.0, -8.0])), ("circle-mixed", v(&[1.0, 0.0]))] {
        let r = run(name, &start);
        let text = trace_to_string(r.problem.dim(), &r.report.trace);
        let back = parse_trace(&text).unwrap();
        assert_eq!(back.len(), r.report.trace.len());
        for (a, b) in back.iter().zip(&r.report.trace) {
            assert_eq!(a.k, b.k);
            assert_eq!(a.j.to_bits(), b.j.to_bits());
            assert_eq!(a.d_norm.to_bits(), b.d_norm.to_bits());
            assert_eq!(a.t.map(f64::to_bits), b.t.map(f64::to_bits));
            assert_eq!(a.active, b.active);
            assert_eq!(a.working, b.working);
            assert!(a.u.iter().zip(b.u.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        assert_eq!(trace_to_string(r.problem.dim(), &back), text);
    }
}
