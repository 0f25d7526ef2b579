//! Projecting onto a finitely generated cone plus a subspace, checked against
//! exhaustive face enumeration.

use csdm::oracle::oracle_project_subset_enumeration;
use csdm::{project_onto_cone, ConeBasis, ProjectionConfig, Vector};

fn main() {
    let edges = vec![Vector::from_vec(vec![1.0, 0.0, 0.0]), Vector::from_vec(vec![1.0, 1.0, 0.0])];
    let free = vec![Vector::from_vec(vec![0.0, 0.0, 1.0])];
    let basis = ConeBasis::new(3, edges, free).unwrap();
    println!("Gram reciprocal condition {:.3}", basis.rcond());

    for v in [[0.0, 1.0, 2.0], [-1.0, 2.0, -1.0], [2.0, -1.0, 0.5], [-1.0, -1.0, 3.0]] {
        let v = Vector::from_row_slice(&v);
        let p = project_onto_cone(&basis, &v, &ProjectionConfig::default()).unwrap();
        let o = oracle_project_subset_enumeration(&basis, &v).unwrap();
        println!(
            "v = {:?}\n  P(v) = {:.4?}  mu = {:.4?}  lambda = {:.4?}\n  oracle distance {:.1e}, <P(v), v - P(v)> = {:.1e}",
            v.as_slice(),
            p.point.as_slice(),
            p.mu.as_slice(),
            p.lambda.as_slice(),
            (&p.point - &o.point).norm(),
            p.point.dot(&p.residual)
        );
    }
}
