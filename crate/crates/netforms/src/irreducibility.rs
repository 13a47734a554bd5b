//! Combinatorial decision of irreducibility and the invariant-ideal
//! decomposition, with a simulation cross-check.
//!
//! Initial data localized on one side of a flagged vertex cannot propagate
//! across it: the Dirichlet pinning decouples the finite spans. The heat
//! flow is irreducible exactly when the finite span of one (equivalently,
//! every) edge is the whole graph; the spans partition the edge set and
//! their boundaries consist of flagged vertices only.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::assembly::{Coupling, EdgeMesh};
use crate::error::SimError;
use crate::graph::{Graph, Subgraph};
use crate::sim::{self, Scenario, Scheme, Stepper};

/// Finite spans covering the edge set, with their (flagged) boundaries.
#[derive(Debug, Clone)]
pub struct IdealDecomposition {
    pub spans: Vec<Subgraph>,
}

impl IdealDecomposition {
    /// Pairwise intersections of span boundaries (always flagged vertices).
    pub fn boundary_intersections(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..self.spans.len() {
            for j in i + 1..self.spans.len() {
                let mut shared: Vec<usize> = self.spans[i]
                    .vertices
                    .iter()
                    .copied()
                    .filter(|v| self.spans[j].vertices.contains(v))
                    .collect();
                shared.sort_unstable();
                out.push(shared);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct IrreducibilityVerdict {
    pub irreducible: bool,
    pub decomposition: IdealDecomposition,
}

/// Decides irreducibility of a connected graph: one span is computed and
/// compared against the whole edge set; the full decomposition enumerates
/// the invariant ideals.
pub fn irreducible(graph: &Graph) -> Result<IrreducibilityVerdict, crate::error::GraphError> {
    if !graph.is_connected() {
        return Err(crate::error::GraphError::GraphDisconnected);
    }
    let ne = graph.edge_count();
    let mut covered = vec![false; ne];
    let mut spans = Vec::new();
    for e in 0..ne {
        if covered[e] {
            continue;
        }
        let span = graph.finite_span_of(e);
        for &f in &span.edges {
            covered[f] = true;
        }
        spans.push(span);
    }
    let irreducible = spans.len() == 1 && spans[0].edges.len() == ne;
    Ok(IrreducibilityVerdict {
        irreducible,
        decomposition: IdealDecomposition { spans },
    })
}

#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    /// Max state magnitude observed outside the seeded span, per span.
    pub off_span_leakage: Vec<f64>,
    /// Min interior value at the final time for the irreducible case.
    pub min_interior: Option<f64>,
    pub matches_combinatorics: bool,
}

/// Runs Kirchhoff heat from an interior indicator on each span and checks
/// that nothing leaks across flagged vertices; in the irreducible case the
/// state must be strictly positive on every edge interior at t = 0.2.
pub fn cross_check(graph: &Graph, mesh: &EdgeMesh) -> Result<CrossCheckReport, SimError> {
    if graph.edge_count() > 64 || mesh.n > 64 {
        return Err(SimError::BudgetExceeded(format!(
            "{} edges at n = {}",
            graph.edge_count(),
            mesh.n
        )));
    }
    let verdict = irreducible(graph)?;
    let stepper = Stepper::new(Scheme::BackwardEuler, 1e-3, 0.2)?;
    let scenario = Scenario::NetworkHeat {
        graph: graph.clone(),
        mesh: *mesh,
        coupling: Coupling::Identity,
        node_matrix: None,
    };
    let matrices = scenario.assemble()?;
    let sys = matrices.assembled.clone().expect("network scenario");

    let mut off_span_leakage = Vec::new();
    let mut min_interior = None;
    for span in &verdict.decomposition.spans {
        let seed_edge = span.edges[0];
        let mut u0: DVector<Complex64> = DVector::zeros(sys.dofs.total);
        for i in 1..=mesh.n {
            u0[sys.dofs.interior(seed_edge, i)] = Complex64::new(1.0, 0.0);
        }
        let traj = sim::run_with_matrices(&scenario, matrices.clone(), &stepper, &u0)?;
        let fin = traj.final_real_state();
        let in_span = |e: usize| span.edges.contains(&e);
        let mut leak = 0.0f64;
        for e in 0..graph.edge_count() {
            if in_span(e) {
                continue;
            }
            for i in 1..=mesh.n {
                leak = leak.max(fin[sys.dofs.interior(e, i)].abs());
            }
        }
        // Leakage over the whole trajectory, not only the final state.
        for state in &traj.states {
            for e in 0..graph.edge_count() {
                if in_span(e) {
                    continue;
                }
                for i in 1..=mesh.n {
                    leak = leak.max(state[sys.dofs.interior(e, i)].norm());
                }
            }
        }
        off_span_leakage.push(leak);
        if verdict.irreducible {
            let mut min = f64::INFINITY;
            for e in 0..graph.edge_count() {
                for i in 1..=mesh.n {
                    min = min.min(fin[sys.dofs.interior(e, i)]);
                }
            }
            min_interior = Some(min);
        }
    }
    let leak_ok = off_span_leakage.iter().all(|&l| l <= 1e-12);
    let positive_ok = min_interior.map_or(true, |m| m > 1e-10);
    Ok(CrossCheckReport {
        off_span_leakage,
        min_interior,
        matches_combinatorics: leak_ok && positive_ok,
    })
}
