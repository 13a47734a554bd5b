use nalgebra::DVector;
use netforms::assembly::{Coupling, EdgeMesh};
use netforms::graph::{Graph, VertexId};
use netforms::sim::{self, initial, Scenario, Scheme, Stepper};
use netforms::symmetry::{discretize_projection, SubspaceSpec};

fn residual(g: &Graph, hat_at: &str, n: usize, dt: f64, scheme: Scheme) -> (f64, f64) {
    let mesh = EdgeMesh { n };
    let scenario = Scenario::NetworkHeat { graph: g.clone(), mesh, coupling: Coupling::Identity, node_matrix: None };
    let stepper = Stepper::new(scheme, dt, 0.04).unwrap();
    let matrices = scenario.assemble().unwrap();
    let sys = matrices.assembled.as_ref().unwrap();
    let p = SubspaceSpec::Averaging.resolve(g).unwrap();
    let ph = discretize_projection(sys, &p);
    let seedv = initial::vertex_hat(g, &mesh, &VertexId(hat_at.into()), 1.0).unwrap().map(|z| z.re);
    let u0r: DVector<f64> = &ph * &seedv;
    let u0 = initial::complexify(&u0r);
    let traj = sim::run_with_matrices(&scenario, matrices, &stepper, &u0).unwrap();
    let rep = sim::check_subspace_invariance(&traj, &SubspaceSpec::Averaging).unwrap();
    (rep.max_residual, rep.tol_inv)
}

fn main() {
    let fig8 = Graph::from_edges(&[
        ("a1", "c", "p"), ("a2", "p", "r"), ("a3", "r", "c"),
        ("b1", "c", "q"), ("b2", "q", "s"), ("b3", "s", "c"),
    ]).unwrap();
    for &(n, dt) in &[(12usize, 2e-3f64), (24, 1e-3), (48, 5e-4)] {
        let (r, tol) = residual(&fig8, "p", n, dt, Scheme::BackwardEuler);
        println!("fig8 BE n={n} dt={dt}: residual={r:.4e} tol={tol:.4e} pass={} ", r <= tol);
    }
    let cyc = Graph::from_edges(&[("e1","v1","v2"),("e2","v2","v3"),("e3","v3","v1")]).unwrap();
    for &(n, dt) in &[(12usize, 2e-3f64), (24, 1e-3)] {
        let (r, tol) = residual(&cyc, "v1", n, dt, Scheme::BackwardEuler);
        println!("cycle BE n={n} dt={dt}: residual={r:.4e} tol={tol:.4e} pass={}", r <= tol);
    }
}
