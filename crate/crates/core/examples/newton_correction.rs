//! The correction pulls a tangent step back onto a curved constraint; the
//! correction size shrinks like t^2, so |Bc(t)| / t decays linearly in t.

use csdm::correction::{correct, superlinearity_probe};
use csdm::problems::builtin;
use csdm::{ConeBasis, FnId, SolverConfig, Vector};

fn main() {
    let problem = builtin("rosenbrock-disk").unwrap();
    let cfg = SolverConfig::default();
    let u = Vector::from_vec(vec![1.0, 1.0]);
    let normal = problem.eval_gradient(FnId::Inequality(1), &u).unwrap();
    let tangent = Vector::from_vec(vec![-normal[1], normal[0]]).normalize();
    let basis = ConeBasis::new(2, vec![normal], vec![]).unwrap();

    let out = correct(&problem, &u, &tangent, &basis, &[1], 0.1, &cfg).unwrap();
    println!(
        "t = 0.1: u(t) = {:.6?}, g1(u(t)) = {:.1e}, {} Newton steps",
        out.u_t.as_slice(),
        problem.eval(FnId::Inequality(1), &out.u_t).unwrap(),
        out.newton_iters
    );

    let ts = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
    for (t, ratio) in superlinearity_probe(&problem, &u, &tangent, &basis, &[1], &ts, &cfg).unwrap() {
        println!("t = {t:.0e}: |Bc(t)|/t = {ratio:.3e}");
    }
}
