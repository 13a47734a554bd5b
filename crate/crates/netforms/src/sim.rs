//! Time integration of the scenario families (network heat, strongly damped
//! wave, heat with dynamic boundary conditions) and the qualitative probes:
//! subspace invariance, positivity, mass conservation, sup-norm behaviour,
//! domination and reflection symmetry.
//!
//! All scenarios are driven as `G x' = -A x` with a constant step matrix
//! factored once per trajectory. Backward Euler is paired with the lumped
//! mass (it yields an entrywise-nonnegative step operator for Kirchhoff
//! heat), Crank-Nicolson with the consistent mass for second-order accuracy.
//! The damped wave runs as a first-order block system in `(u, u')`; its
//! domain condition is enforced by the implicit solve for `alpha u + u'`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::assembly::{build, AssembledSystem, Coupling, EdgeMesh};
use crate::error::SimError;
use crate::graph::Graph;
use crate::linalg;
use crate::symmetry::{discretize_projection, SubspaceSpec};

/// Calibration constant of the invariance tolerance, fixed once against the
/// single-edge benchmark.
pub const INVARIANCE_CALIBRATION: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    BackwardEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
}

impl Stepper {
    pub fn new(scheme: Scheme, dt: f64, t_end: f64) -> Result<Self, SimError> {
        if !(dt > 0.0) || t_end < dt {
            return Err(SimError::InvalidScenario(format!(
                "need dt > 0 and T >= dt, got dt = {dt}, T = {t_end}"
            )));
        }
        Ok(Stepper { scheme, dt, t_end })
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}

/// A scenario owns its discretization inputs; initial data is supplied as a
/// dof vector built by the helpers below.
#[derive(Debug, Clone)]
pub enum Scenario {
    NetworkHeat {
        graph: Graph,
        mesh: EdgeMesh,
        coupling: Coupling,
        node_matrix: Option<DMatrix<f64>>,
    },
    /// Strongly damped wave on the interval, Neumann ends; state `(u, u')`.
    DampedWave { mesh: EdgeMesh, alpha: Complex64 },
    /// Interval heat with dynamic boundary values; state `(u, w0, w1)`.
    DynamicBc { mesh: EdgeMesh },
}

/// Matrices of the first-order system `G x' = -A x`, with both mass
/// variants for the heat case.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub g_lumped: DMatrix<Complex64>,
    pub g_consistent: DMatrix<Complex64>,
    pub a: DMatrix<Complex64>,
    /// Assembled network system when the scenario lives on a graph.
    pub assembled: Option<AssembledSystem>,
    /// Interval stiffness/mass for the wave energy functional.
    pub wave_blocks: Option<(DMatrix<f64>, DMatrix<f64>)>,
    /// Dofs carrying `u` (sup-norm and positivity probes look at these).
    pub state_dofs: usize,
}

/// The unit interval as a single unflagged edge: vertex dofs are the two
/// endpoints (x = 1 end first in file order), then the interior points.
pub fn interval_graph() -> Graph {
    Graph::from_edges(&[("e1", "v1", "v2")]).expect("static fixture")
}

impl Scenario {
    pub fn assemble(&self) -> Result<SystemMatrices, SimError> {
        match self {
            Scenario::NetworkHeat {
                graph,
                mesh,
                coupling,
                node_matrix,
            } => {
                let sys = build(graph, mesh, coupling, node_matrix.as_ref())?;
                let a = linalg::to_complex(&sys.form_matrix());
                let g_consistent = linalg::to_complex(&sys.mass);
                let g_lumped =
                    linalg::to_complex(&DMatrix::from_diagonal(&sys.lumped_mass));
                let n = sys.dofs.total;
                Ok(SystemMatrices {
                    g_lumped,
                    g_consistent,
                    a,
                    assembled: Some(sys),
                    wave_blocks: None,
                    state_dofs: n,
                })
            }
            Scenario::DampedWave { mesh, alpha } => {
                let sys = build(&interval_graph(), mesh, &Coupling::Identity, None)?;
                let k = sys.stiffness.clone();
                let m = sys.mass.clone();
                let n = sys.dofs.total;
                let zc = Complex64::new(0.0, 0.0);
                let mut a = DMatrix::from_element(2 * n, 2 * n, zc);
                let mc = linalg::to_complex(&m);
                let kc = linalg::to_complex(&k);
                a.view_mut((0, n), (n, n)).copy_from(&(-&mc));
                a.view_mut((n, 0), (n, n)).copy_from(&(&kc * *alpha));
                a.view_mut((n, n), (n, n)).copy_from(&kc);
                let mut g = DMatrix::from_element(2 * n, 2 * n, zc);
                g.view_mut((0, 0), (n, n)).copy_from(&mc);
                g.view_mut((n, n), (n, n)).copy_from(&mc);
                let mut gl = DMatrix::from_element(2 * n, 2 * n, zc);
                let lump = linalg::to_complex(&DMatrix::from_diagonal(&sys.lumped_mass));
                gl.view_mut((0, 0), (n, n)).copy_from(&lump);
                gl.view_mut((n, n), (n, n)).copy_from(&lump);
                Ok(SystemMatrices {
                    g_lumped: gl,
                    g_consistent: g,
                    a,
                    assembled: Some(sys),
                    wave_blocks: Some((k, m)),
                    state_dofs: n,
                })
            }
            Scenario::DynamicBc { mesh } => {
                let sys = build(&interval_graph(), mesh, &Coupling::Identity, None)?;
                let n = sys.dofs.total;
                // Boundary dofs: x = 0 is the `to` vertex, x = 1 the `from`.
                let (from, to) = sys.graph.endpoints(0);
                let d0 = sys.dofs.vertex_dof[to].unwrap();
                let d1 = sys.dofs.vertex_dof[from].unwrap();
                let total = n + 2;
                let mut a = DMatrix::zeros(total, total);
                a.view_mut((0, 0), (n, n))
                    .copy_from(&linalg::to_complex(&sys.stiffness));
                let minus = Complex64::new(-1.0, 0.0);
                // Flux coupling w = du/dnu and boundary feed w' = u(z).
                a[(d0, n)] = minus;
                a[(d1, n + 1)] = minus;
                a[(n, d0)] = minus;
                a[(n + 1, d1)] = minus;
                let one = Complex64::new(1.0, 0.0);
                let mut g = DMatrix::zeros(total, total);
                g.view_mut((0, 0), (n, n))
                    .copy_from(&linalg::to_complex(&sys.mass));
                g[(n, n)] = one;
                g[(n + 1, n + 1)] = one;
                let mut gl = DMatrix::zeros(total, total);
                gl.view_mut((0, 0), (n, n)).copy_from(&linalg::to_complex(
                    &DMatrix::from_diagonal(&sys.lumped_mass),
                ));
                gl[(n, n)] = one;
                gl[(n + 1, n + 1)] = one;
                Ok(SystemMatrices {
                    g_lumped: gl,
                    g_consistent: g,
                    a,
                    assembled: Some(sys),
                    wave_blocks: None,
                    state_dofs: total,
                })
            }
        }
    }

    /// Uncoupled variant of the dynamic-boundary system (boundary values
    /// evolve independently of the bulk).
    pub fn assemble_uncoupled_dynamic_bc(mesh: &EdgeMesh) -> Result<SystemMatrices, SimError> {
        let mut m = Scenario::DynamicBc { mesh: *mesh }.assemble()?;
        let n = m.a.nrows() - 2;
        let zero = Complex64::new(0.0, 0.0);
        for z in 0..2 {
            for p in 0..n {
                m.a[(p, n + z)] = zero;
                m.a[(n + z, p)] = zero;
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<Complex64>>,
    pub scheme: Scheme,
    pub dt: f64,
    pub h: f64,
    /// Functional curves computed alongside the run.
    pub l2_norm: Vec<f64>,
    pub sup_norm: Vec<f64>,
    pub min_value: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub matrices: SystemMatrices,
}

impl Trajectory {
    pub fn real_state(&self, k: usize) -> DVector<f64> {
        self.states[k].map(|z| z.re)
    }

    pub fn final_real_state(&self) -> DVector<f64> {
        self.real_state(self.states.len() - 1)
    }
}

/// Integrates a scenario from the given initial dof vector.
pub fn run(
    scenario: &Scenario,
    stepper: &Stepper,
    initial: &DVector<Complex64>,
) -> Result<Trajectory, SimError> {
    let matrices = scenario.assemble()?;
    run_with_matrices(scenario, matrices, stepper, initial)
}

pub fn run_with_matrices(
    scenario: &Scenario,
    matrices: SystemMatrices,
    stepper: &Stepper,
    initial: &DVector<Complex64>,
) -> Result<Trajectory, SimError> {
    let n = matrices.a.nrows();
    if initial.len() != n {
        return Err(SimError::InvalidScenario(format!(
            "initial data has {} dofs, system has {n}",
            initial.len()
        )));
    }
    let g = match stepper.scheme {
        Scheme::BackwardEuler => &matrices.g_lumped,
        Scheme::CrankNicolson => &matrices.g_consistent,
    };
    let dt = Complex64::new(stepper.dt, 0.0);
    let half = Complex64::new(0.5 * stepper.dt, 0.0);
    let (lhs, rhs) = match stepper.scheme {
        Scheme::BackwardEuler => (g + &matrices.a * dt, g.clone()),
        Scheme::CrankNicolson => (g + &matrices.a * half, g - &matrices.a * half),
    };
    let lu = lhs.lu();
    let steps = stepper.steps();
    let mut states = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    times.push(0.0);
    let mut x = initial.clone();
    for k in 1..=steps {
        let b = &rhs * &x;
        x = lu.solve(&b).ok_or(SimError::SingularStepMatrix)?;
        let t = k as f64 * stepper.dt;
        if x.norm() > 1e12 {
            return Err(SimError::UnstableStep(t));
        }
        states.push(x.clone());
        times.push(t);
    }

    let mut traj = Trajectory {
        times,
        states,
        scheme: stepper.scheme,
        dt: stepper.dt,
        h: matrices
            .assembled
            .as_ref()
            .map(|s| s.h())
            .unwrap_or(0.0),
        l2_norm: Vec::new(),
        sup_norm: Vec::new(),
        min_value: Vec::new(),
        mass: Vec::new(),
        energy: Vec::new(),
        matrices,
    };
    compute_functionals(scenario, &mut traj);
    Ok(traj)
}

fn compute_functionals(scenario: &Scenario, traj: &mut Trajectory) {
    let nstate = traj.matrices.state_dofs;
    for x in &traj.states {
        let u = x.rows(0, nstate.min(x.len())).into_owned();
        traj.sup_norm
            .push(u.iter().fold(0.0f64, |a, z| a.max(z.norm())));
        traj.min_value
            .push(u.iter().fold(f64::INFINITY, |a, z| a.min(z.re)));
        match scenario {
            Scenario::NetworkHeat { .. } => {
                let sys = traj.matrices.assembled.as_ref().unwrap();
                let ur = u.map(|z| z.re);
                traj.l2_norm.push(sys.l2_norm(&ur));
                traj.mass.push(sys.lumped_mass.dot(&ur));
                let a = sys.form_matrix();
                traj.energy.push(ur.dot(&(&a * &ur)));
            }
            Scenario::DampedWave { alpha, .. } => {
                let (k, m) = traj.matrices.wave_blocks.as_ref().unwrap();
                let nu = k.nrows();
                let uu = x.rows(0, nu).into_owned();
                let vv = x.rows(nu, nu).into_owned();
                let kinetic = (vv.adjoint() * linalg::to_complex(m) * &vv)[(0, 0)].re;
                let strain = (uu.adjoint() * linalg::to_complex(k) * &uu)[(0, 0)].re;
                traj.energy.push(kinetic + alpha.re * strain);
                let mc = linalg::to_complex(m);
                let l2 = (uu.adjoint() * &mc * &uu)[(0, 0)].re.max(0.0).sqrt();
                traj.l2_norm.push(l2);
                traj.mass.push(0.0);
            }
            Scenario::DynamicBc { .. } => {
                let sys = traj.matrices.assembled.as_ref().unwrap();
                let nu = sys.dofs.total;
                let ur = x.rows(0, nu).into_owned().map(|z| z.re);
                traj.l2_norm.push(sys.l2_norm(&ur));
                let bulk = sys.lumped_mass.dot(&ur);
                let boundary = x[nu].re + x[nu + 1].re;
                traj.mass.push(bulk + boundary);
                traj.energy.push(ur.dot(&(&sys.stiffness * &ur)));
            }
        }
    }
}

/// Observed exponential decay rate of the L2 norm over the whole run.
pub fn decay_rate(traj: &Trajectory) -> f64 {
    let first = traj.l2_norm.first().copied().unwrap_or(0.0);
    let last = traj.l2_norm.last().copied().unwrap_or(0.0);
    let t = traj.times.last().copied().unwrap_or(1.0);
    if first <= 0.0 || last <= 0.0 || t <= 0.0 {
        return 0.0;
    }
    -(last / first).ln() / t
}

#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub max_residual: f64,
    pub tol_inv: f64,
    pub pass: bool,
}

/// Maximum over time of the component of the state outside the discretized
/// subspace, for a trajectory started inside it. The tolerance scales as
/// `O(h^2 + dt^2)` with the calibration constant fixed once.
pub fn check_subspace_invariance(
    traj: &Trajectory,
    spec: &SubspaceSpec,
) -> Result<InvarianceReport, SimError> {
    let sys = traj
        .matrices
        .assembled
        .as_ref()
        .filter(|_| traj.matrices.wave_blocks.is_none())
        .ok_or_else(|| SimError::InvalidScenario("invariance probe needs network heat".into()))?;
    let p = spec
        .resolve(&sys.graph)
        .map_err(|e| SimError::InvalidScenario(e.to_string()))?;
    let ph = discretize_projection(sys, &p);
    let u0 = traj.real_state(0);
    let norm0 = sys.l2_norm(&u0);
    let mut max_residual = 0.0f64;
    for k in 0..traj.states.len() {
        let u = traj.real_state(k);
        let out = &u - &ph * &u;
        max_residual = max_residual.max(sys.l2_norm(&out));
    }
    let tol_inv = INVARIANCE_CALIBRATION * (traj.h * traj.h + traj.dt * traj.dt) * norm0;
    Ok(InvarianceReport {
        max_residual,
        tol_inv,
        pass: max_residual <= tol_inv,
    })
}

/// Minimum state entry over the whole trajectory; `None` when the initial
/// data is not nonnegative (the probe's precondition).
pub fn check_positivity(traj: &Trajectory) -> Option<f64> {
    if traj.min_value.first().copied().unwrap_or(0.0) < 0.0 {
        return None;
    }
    traj.min_value
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
        .into()
}

/// Largest drift of the lumped-mass total; `None` when a flagged vertex
/// makes the balance leak by design.
pub fn check_mass(traj: &Trajectory) -> Option<f64> {
    let sys = traj.matrices.assembled.as_ref()?;
    if sys.graph.has_flagged() || traj.matrices.wave_blocks.is_some() {
        return None;
    }
    let m0 = traj.mass.first()?;
    Some(
        traj.mass
            .iter()
            .fold(0.0f64, |a, &m| a.max((m - m0).abs())),
    )
}

/// Curve of the sup norm relative to the initial one.
pub fn check_linf(traj: &Trajectory) -> Vec<f64> {
    let s0 = traj.sup_norm.first().copied().unwrap_or(0.0);
    if s0 == 0.0 {
        return traj.sup_norm.clone();
    }
    traj.sup_norm.iter().map(|s| s / s0).collect()
}

/// Max entrywise violation of `|u_b(t)| <= u_a(t)`.
pub fn check_domination(traj_a: &Trajectory, traj_b: &Trajectory) -> Result<f64, SimError> {
    if traj_a.states.len() != traj_b.states.len()
        || traj_a.states[0].len() != traj_b.states[0].len()
    {
        return Err(SimError::MeshMismatch);
    }
    let mut violation = 0.0f64;
    for (xa, xb) in traj_a.states.iter().zip(&traj_b.states) {
        for (za, zb) in xa.iter().zip(xb.iter()) {
            violation = violation.max(zb.norm() - za.re);
        }
    }
    Ok(violation)
}

/// Max over time of the deviation from reflection symmetry about x = 1/2 on
/// interval scenarios.
pub fn check_even_symmetry(traj: &Trajectory) -> Result<f64, SimError> {
    let sys = traj
        .matrices
        .assembled
        .as_ref()
        .ok_or_else(|| SimError::InvalidScenario("even-symmetry probe needs a mesh".into()))?;
    if sys.graph.edge_count() != 1 {
        return Err(SimError::InvalidScenario(
            "even-symmetry probe runs on the interval".into(),
        ));
    }
    let n = sys.dofs.total;
    let reflect_block = |u: &DVector<Complex64>| -> DVector<Complex64> {
        let mut r = u.clone();
        // Vertex dofs: file order is (v1 at x = 1, v2 at x = 0).
        r.swap_rows(0, 1);
        let ni = sys.mesh.n;
        for i in 1..=ni {
            r[sys.dofs.interior(0, i)] = u[sys.dofs.interior(0, ni + 1 - i)];
        }
        r
    };
    let mut worst = 0.0f64;
    for x in &traj.states {
        let blocks = x.len() / n;
        for b in 0..blocks {
            let u = x.rows(b * n, n).into_owned();
            let d = &u - reflect_block(&u);
            worst = worst.max(d.iter().fold(0.0f64, |a, z| a.max(z.norm())));
        }
    }
    Ok(worst)
}

/// Discrete energy curve is non-increasing (up to roundoff slack).
pub fn energy_monotone(traj: &Trajectory, slack: f64) -> bool {
    traj.energy.windows(2).all(|w| w[1] <= w[0] + slack)
}

/// Searches seeded initial data of sup norm at most one for a trajectory
/// leaving the unit ball; the all-ones data is probed first.
pub fn linf_violation_search(
    mesh: &EdgeMesh,
    stepper: &Stepper,
    seeds: u64,
) -> Result<Option<(u64, f64)>, SimError> {
    use rand::Rng;
    use rand::SeedableRng;
    let scenario = Scenario::DynamicBc { mesh: *mesh };
    let matrices = scenario.assemble()?;
    let total = matrices.a.nrows();
    for seed in 0..=seeds {
        let initial: DVector<Complex64> = if seed == 0 {
            DVector::from_element(total, Complex64::new(1.0, 0.0))
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            DVector::from_fn(total, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), 0.0)
            })
        };
        let traj = run_with_matrices(&scenario, matrices.clone(), stepper, &initial)?;
        let sup0 = traj.sup_norm[0];
        let max_ratio = traj
            .sup_norm
            .iter()
            .fold(0.0f64, |a, &s| a.max(s / sup0));
        if max_ratio > 1.0 + 1e-3 {
            return Ok(Some((seed, max_ratio)));
        }
    }
    Ok(None)
}

/// Initial-data builders for the network heat scenario.
pub mod initial {
    use super::*;
    use crate::assembly::{affine_interpolant, DofMap};

    pub fn zero(total: usize) -> DVector<Complex64> {
        DVector::from_element(total, Complex64::new(0.0, 0.0))
    }

    pub fn complexify(u: &DVector<f64>) -> DVector<Complex64> {
        u.map(|x| Complex64::new(x, 0.0))
    }

    /// `sin(pi x)` on every edge (vanishes at all vertices).
    pub fn sin_pi(graph: &Graph, mesh: &EdgeMesh) -> DVector<Complex64> {
        profile_on_edges(graph, mesh, |x| (std::f64::consts::PI * x).sin())
    }

    /// The same profile on every edge; the profile must take equal values at
    /// both endpoints to be continuous on general graphs.
    pub fn profile_on_edges(
        graph: &Graph,
        mesh: &EdgeMesh,
        f: impl Fn(f64) -> f64,
    ) -> DVector<Complex64> {
        let dofs = DofMap::new(graph, mesh);
        let mut u = DVector::zeros(dofs.total);
        let h = mesh.h();
        let endpoint = f(0.0);
        for k in 0..dofs.vertex_dofs() {
            u[k] = endpoint;
        }
        for e in 0..graph.edge_count() {
            for i in 1..=mesh.n {
                u[dofs.interior(e, i)] = f(i as f64 * h);
            }
        }
        complexify(&u)
    }

    /// Affine hat of the given value at one vertex.
    pub fn vertex_hat(
        graph: &Graph,
        mesh: &EdgeMesh,
        vertex: &crate::graph::VertexId,
        value: f64,
    ) -> Result<DVector<Complex64>, SimError> {
        let v = graph
            .vertex_position(vertex)
            .ok_or_else(|| SimError::InvalidScenario(format!("unknown vertex `{vertex}`")))?;
        let dofs = DofMap::new(graph, mesh);
        let mut d = DVector::zeros(dofs.vertex_dofs());
        match dofs.vertex_dof[v] {
            Some(k) => d[k] = value,
            None => {
                return Err(SimError::InvalidScenario(format!(
                    "vertex `{vertex}` is flagged"
                )))
            }
        }
        Ok(complexify(&affine_interpolant(graph, mesh, &d)))
    }

    /// Interior indicator of one edge (1 at its interior dofs).
    pub fn edge_indicator(
        graph: &Graph,
        mesh: &EdgeMesh,
        edge: &crate::graph::EdgeId,
    ) -> Result<DVector<Complex64>, SimError> {
        let e = graph
            .edge_position(edge)
            .ok_or_else(|| SimError::InvalidScenario(format!("unknown edge `{edge}`")))?;
        let dofs = DofMap::new(graph, mesh);
        let mut u = DVector::zeros(dofs.total);
        for i in 1..=mesh.n {
            u[dofs.interior(e, i)] = 1.0;
        }
        Ok(complexify(&u))
    }

    /// One-dimensional profile on the interval dof layout.
    pub fn interval_profile(mesh: &EdgeMesh, f: impl Fn(f64) -> f64) -> DVector<f64> {
        let g = interval_graph();
        let dofs = DofMap::new(&g, mesh);
        let mut u = DVector::zeros(dofs.total);
        // File order: v1 carries x = 1, v2 carries x = 0.
        u[0] = f(1.0);
        u[1] = f(0.0);
        let h = mesh.h();
        for i in 1..=mesh.n {
            u[dofs.interior(0, i)] = f(i as f64 * h);
        }
        u
    }

    /// Wave state from u and v profiles.
    pub fn wave_state(
        mesh: &EdgeMesh,
        u: impl Fn(f64) -> f64,
        v: impl Fn(f64) -> f64,
    ) -> DVector<Complex64> {
        let uu = interval_profile(mesh, u);
        let vv = interval_profile(mesh, v);
        let n = uu.len();
        let mut x = DVector::zeros(2 * n);
        for i in 0..n {
            x[i] = Complex64::new(uu[i], 0.0);
            x[n + i] = Complex64::new(vv[i], 0.0);
        }
        x
    }

    /// Dynamic-boundary state from a bulk profile and two boundary values.
    pub fn dynamic_bc_state(mesh: &EdgeMesh, u: impl Fn(f64) -> f64, w: [f64; 2]) -> DVector<Complex64> {
        let uu = interval_profile(mesh, u);
        let n = uu.len();
        let mut x = DVector::zeros(n + 2);
        for i in 0..n {
            x[i] = Complex64::new(uu[i], 0.0);
        }
        x[n] = Complex64::new(w[0], 0.0);
        x[n + 1] = Complex64::new(w[1], 0.0);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_dirichlet_decay_matches_pi_squared() {
        let g = Graph::from_edges_flagged(&[("e1", "a", "b")], &["a", "b"]).unwrap();
        let mesh = EdgeMesh { n: 128 };
        let scenario = Scenario::NetworkHeat {
            graph: g.clone(),
            mesh,
            coupling: Coupling::Identity,
            node_matrix: None,
        };
        let stepper = Stepper::new(Scheme::CrankNicolson, 1e-4, 0.1).unwrap();
        let u0 = initial::sin_pi(&g, &mesh);
        let traj = run(&scenario, &stepper, &u0).unwrap();
        let rate = decay_rate(&traj);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(
            (rate - pi2).abs() / pi2 < 0.01,
            "rate {rate} vs {pi2}"
        );
    }

    #[test]
    fn crank_nicolson_is_second_order_in_dt() {
        let g = Graph::from_edges_flagged(&[("e1", "a", "b")], &["a", "b"]).unwrap();
        let mesh = EdgeMesh { n: 64 };
        let err = |dt: f64| {
            let scenario = Scenario::NetworkHeat {
                graph: g.clone(),
                mesh,
                coupling: Coupling::Identity,
                node_matrix: None,
            };
            let stepper = Stepper::new(Scheme::CrankNicolson, dt, 0.1).unwrap();
            let u0 = initial::sin_pi(&g, &mesh);
            let traj = run(&scenario, &stepper, &u0).unwrap();
            // Compare against the exact decay of the DISCRETE eigenvalue so
            // only the time error remains.
            let sys = traj.matrices.assembled.as_ref().unwrap();
            let lam = crate::linalg::pencil_eigs(&sys.form_matrix(), &sys.mass).unwrap()[0];
            let exact = traj.l2_norm[0] * (-lam * 0.1).exp();
            (traj.l2_norm.last().unwrap() - exact).abs()
        };
        let e1 = err(2e-3);
        let e2 = err(1e-3);
        let ratio = e1 / e2;
        assert!((3.4..4.6).contains(&ratio), "dt ratio {ratio}");
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let g = interval_graph();
        let mesh = EdgeMesh { n: 8 };
        let scenario = Scenario::NetworkHeat {
            graph: g,
            mesh,
            coupling: Coupling::Identity,
            node_matrix: None,
        };
        let stepper = Stepper::new(Scheme::BackwardEuler, 0.01, 0.1).unwrap();
        let traj = run(&scenario, &stepper, &initial::zero(10)).unwrap();
        assert!(traj.sup_norm.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn backward_euler_step_operator_is_nonnegative() {
        // (L + dt K)^-1 L has nonnegative entries for Kirchhoff heat.
        let g = Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")])
            .unwrap();
        let mesh = EdgeMesh { n: 6 };
        let sys = build(&g, &mesh, &Coupling::Identity, None).unwrap();
        let l = DMatrix::from_diagonal(&sys.lumped_mass);
        let step = (&l + sys.form_matrix() * 0.01)
            .try_inverse()
            .unwrap()
            * &l;
        assert!(step.iter().all(|&x| x >= -1e-13));
    }

    #[test]
    fn positivity_and_mass_on_the_cycle() {
        let g = Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")])
            .unwrap();
        let mesh = EdgeMesh { n: 16 };
        let scenario = Scenario::NetworkHeat {
            graph: g.clone(),
            mesh,
            coupling: Coupling::Identity,
            node_matrix: None,
        };
        let stepper = Stepper::new(Scheme::BackwardEuler, 1e-3, 0.2).unwrap();
        let u0 = initial::vertex_hat(&g, &mesh, &crate::graph::VertexId("v1".into()), 1.0)
            .unwrap();
        let traj = run(&scenario, &stepper, &u0).unwrap();
        let min = check_positivity(&traj).expect("nonnegative data");
        assert!(min >= -1e-12, "min {min}");
        let drift = check_mass(&traj).expect("no flags");
        assert!(drift <= 1e-10 * traj.l2_norm[0], "drift {drift}");
        // Sup norm of Kirchhoff heat stays within the initial bound.
        let curve = check_linf(&traj);
        assert!(curve.iter().all(|&r| r <= 1.0 + 1e-9));
    }

    #[test]
    fn positive_cross_coupling_breaks_positivity() {
        let g = Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v1", "v2")]).unwrap();
        let mesh = EdgeMesh { n: 16 };
        let mut c = DMatrix::identity(2, 2);
        c[(0, 1)] = 0.5;
        c[(1, 0)] = 0.5;
        let scenario = Scenario::NetworkHeat {
            graph: g.clone(),
            mesh,
            coupling: Coupling::Constant(c),
            node_matrix: None,
        };
        let stepper = Stepper::new(Scheme::BackwardEuler, 1e-3, 0.05).unwrap();
        let u0 = initial::edge_indicator(&g, &mesh, &crate::graph::EdgeId("e1".into())).unwrap();
        let traj = run(&scenario, &stepper, &u0).unwrap();
        let min = traj.min_value.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        assert!(min < -1e-6, "expected negativity, min {min}");
    }

    #[test]
    fn invariance_on_the_eulerian_cycle_and_leakage_on_the_path() {
        let cycle =
            Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")])
                .unwrap();
        let mesh = EdgeMesh { n: 24 };
        let stepper = Stepper::new(Scheme::CrankNicolson, 1e-3, 0.05).unwrap();
        let scenario = Scenario::NetworkHeat {
            graph: cycle.clone(),
            mesh,
            coupling: Coupling::Identity,
            node_matrix: None,
        };
        let u0 = initial::profile_on_edges(&cycle, &mesh, |x| (2.0 * std::f64::consts::PI * x).cos());
        let traj = run(&scenario, &stepper, &u0).unwrap();
        let rep = check_subspace_invariance(&traj, &SubspaceSpec::Averaging).unwrap();
        assert!(rep.pass, "residual {} tol {}", rep.max_residual, rep.tol_inv);

        // Inadmissible control: directed path with averaging. The mesh must
        // be fine enough for the O(1) leakage to clear 100x the tolerance.
        let path =
            Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v4")])
                .unwrap();
        let mesh = EdgeMesh { n: 224 };
        let stepper = Stepper::new(Scheme::CrankNicolson, 4e-4, 0.05).unwrap();
        let scenario = Scenario::NetworkHeat {
            graph: path.clone(),
            mesh,
            coupling: Coupling::Identity,
            node_matrix: None,
        };
        let matrices = scenario.assemble().unwrap();
        let sys = matrices.assembled.as_ref().unwrap();
        let p = SubspaceSpec::Averaging.resolve(&path).unwrap();
        let ph = discretize_projection(sys, &p);
        // Start inside the discretized subspace, away from the constants.
        let seedv = initial::vertex_hat(&path, &mesh, &crate::graph::VertexId("v1".into()), 1.0)
            .unwrap()
            .map(|z| z.re);
        let u0 = initial::complexify(&(&ph * &seedv));
        let traj = run_with_matrices(&scenario, matrices, &stepper, &u0).unwrap();
        let rep = check_subspace_invariance(&traj, &SubspaceSpec::Averaging).unwrap();
        assert!(
            rep.max_residual > 100.0 * rep.tol_inv,
            "leakage {} tol {}",
            rep.max_residual,
            rep.tol_inv
        );
    }

    #[test]
    fn invariance_residual_scales_with_resolution() {
        // Eulerian figure-eight: averaging is admissible but the discrete
        // commutator is nonzero, so the residual is resolution-limited.
        let g = Graph::from_edges(&[
            ("a1", "c", "p"),
            ("a2", "p", "c"),
            ("b1", "c", "q"),
            ("b2", "q", "c"),
        ])
        .unwrap();
        let residual = |n: usize, dt: f64| {
            let mesh = EdgeMesh { n };
            let scenario = Scenario::NetworkHeat {
                graph: g.clone(),
                mesh,
                coupling: Coupling::Identity,
                node_matrix: None,
            };
            let stepper = Stepper::new(Scheme::CrankNicolson, dt, 0.04).unwrap();
            // Hat at p: lies in the averaging subspace only after projection.
            let matrices = scenario.assemble().unwrap();
            let sys = matrices.assembled.as_ref().unwrap();
            let p = SubspaceSpec::Averaging.resolve(&g).unwrap();
            let ph = discretize_projection(sys, &p);
            let seedv =
                initial::vertex_hat(&g, &mesh, &crate::graph::VertexId("p".into()), 1.0)
                    .unwrap()
                    .map(|z| z.re);
            let u0 = initial::complexify(&(&ph * &seedv));
            let traj = run_with_matrices(&scenario, matrices, &stepper, &u0).unwrap();
            check_subspace_invariance(&traj, &SubspaceSpec::Averaging)
                .unwrap()
                .max_residual
        };
        let coarse = residual(12, 2e-3);
        let fine = residual(24, 1e-3);
        if coarse > 1e-13 {
            assert!(coarse / fine >= 3.0, "scaling {coarse} -> {fine}");
        }
    }

    #[test]
    fn damped_wave_energy_is_nonincreasing_for_real_alpha() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let mesh = EdgeMesh { n: 32 };
            let scenario = Scenario::DampedWave {
                mesh,
                alpha: Complex64::new(alpha, 0.0),
            };
            let stepper = Stepper::new(Scheme::CrankNicolson, 1e-3, 0.2).unwrap();
            let x0 = initial::wave_state(
                &mesh,
                |x| (std::f64::consts::PI * x).cos(),
                |_| 0.0,
            );
            let traj = run(&scenario, &stepper, &x0).unwrap();
            assert!(
                energy_monotone(&traj, 1e-10 * traj.energy[0].abs().max(1.0)),
                "alpha = {alpha}"
            );
        }
    }

    #[test]
    fn even_initial_data_stays_even() {
        let mesh = EdgeMesh { n: 32 };
        let scenario = Scenario::DampedWave {
            mesh,
            alpha: Complex64::new(1.0, 0.0),
        };
        let stepper = Stepper::new(Scheme::CrankNicolson, 1e-3, 0.1).unwrap();
        let even = |x: f64| (2.0 * std::f64::consts::PI * x).cos();
        let x0 = initial::wave_state(&mesh, even, |_| 0.0);
        let traj = run(&scenario, &stepper, &x0).unwrap();
        let res = check_even_symmetry(&traj).unwrap();
        let tol = INVARIANCE_CALIBRATION * (traj.h * traj.h + traj.dt * traj.dt);
        assert!(res <= tol, "reflection residual {res}");

        // Odd data keeps its sign symmetry, so evenness fails; this is
        // reported, not asserted.
        let odd = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
        let x1 = initial::wave_state(&mesh, odd, |_| 0.0);
        let traj = run(&scenario, &stepper, &x1).unwrap();
        let res_odd = check_even_symmetry(&traj).unwrap();
        assert!(res_odd > 0.1);
    }

    #[test]
    fn dynamic_bc_dominates_its_uncoupled_part_and_leaves_the_unit_ball() {
        let mesh = EdgeMesh { n: 24 };
        let stepper = Stepper::new(Scheme::BackwardEuler, 1e-3, 0.05).unwrap();
        let scenario = Scenario::DynamicBc { mesh };
        let coupled = scenario.assemble().unwrap();
        let uncoupled = Scenario::assemble_uncoupled_dynamic_bc(&mesh).unwrap();
        let x0 = initial::dynamic_bc_state(&mesh, |x| (3.1 * x).sin() - 0.4, [0.8, -0.6]);
        let x0_abs = x0.map(|z| Complex64::new(z.norm(), 0.0));
        let traj_b = run_with_matrices(&scenario, uncoupled, &stepper, &x0).unwrap();
        let traj_a = run_with_matrices(&scenario, coupled, &stepper, &x0_abs).unwrap();
        let violation = check_domination(&traj_a, &traj_b).unwrap();
        assert!(violation <= 1e-9, "violation {violation}");

        // The coupled semigroup does not preserve the sup-norm unit ball.
        let found = linf_violation_search(&mesh, &stepper, 4).unwrap();
        assert!(found.is_some());
    }

    #[test]
    fn domination_fails_with_enlarged_coupling() {
        // A sign flip alone preserves the moduli, so domination survives it;
        // enlarging the boundary feed magnitude violates the comparison.
        let mesh = EdgeMesh { n: 16 };
        let stepper = Stepper::new(Scheme::BackwardEuler, 1e-3, 0.05).unwrap();
        let scenario = Scenario::DynamicBc { mesh };
        let coupled = scenario.assemble().unwrap();
        let mut pumped = coupled.clone();
        let n = pumped.a.nrows() - 2;
        let (from, to) = coupled.assembled.as_ref().unwrap().graph.endpoints(0);
        let d0 = coupled.assembled.as_ref().unwrap().dofs.vertex_dof[to].unwrap();
        let d1 = coupled.assembled.as_ref().unwrap().dofs.vertex_dof[from].unwrap();
        let feed = Complex64::new(-3.0, 0.0);
        pumped.a[(n, d0)] = feed;
        pumped.a[(n + 1, d1)] = feed;
        let x0 = initial::dynamic_bc_state(&mesh, |x| 0.5 + 0.5 * (6.0 * x).cos(), [0.2, 0.9]);
        let x0_abs = x0.map(|z| Complex64::new(z.norm(), 0.0));
        let traj_a = run_with_matrices(&scenario, coupled, &stepper, &x0_abs).unwrap();
        let traj_b = run_with_matrices(&scenario, pumped, &stepper, &x0).unwrap();
        let violation = check_domination(&traj_a, &traj_b).unwrap();
        assert!(violation > 1e-6, "violation {violation}");
    }

    #[test]
    fn invalid_steppers_are_rejected() {
        assert!(Stepper::new(Scheme::BackwardEuler, 0.0, 1.0).is_err());
        assert!(Stepper::new(Scheme::BackwardEuler, 0.1, 0.05).is_err());
    }
}
