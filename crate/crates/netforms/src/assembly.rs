//! Per-edge P1 finite elements for the network form, with shared vertex
//! degrees of freedom and Dirichlet elimination at flagged vertices.
//!
//! Every edge carries the same uniform mesh of `n` interior points,
//! `h = 1/(n + 1)`. Mesh node `0` of an edge sits at `x = 0` (the `to`
//! vertex), node `n + 1` at `x = 1` (the `from` vertex). Node continuity is
//! encoded in the dof map: all edge endpoints meeting at a non-flagged
//! vertex share that vertex's dof, so the discrete space is conforming by
//! construction. Flagged vertices have no dof; their values are pinned to
//! zero by elimination, which keeps the stiffness symmetric positive
//! semidefinite.
//!
//! Element integrals are exact for the constant coefficients used here, so
//! products of P1 functions are integrated exactly.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::AssemblyError;
use crate::graph::Graph;

/// Uniform per-edge mesh: `n` interior points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct EdgeMesh {
    pub n: usize,
}

impl EdgeMesh {
    pub fn h(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }
}

/// Coupling operator `C` of the principal part, constant in `x`.
#[derive(Debug, Clone)]
pub enum Coupling {
    Identity,
    /// Full constant `|E| x |E|` matrix.
    Constant(DMatrix<f64>),
    /// Per-edge diagonal values.
    Diagonal(Vec<f64>),
}

impl Coupling {
    pub fn to_matrix(&self, ne: usize) -> Result<DMatrix<f64>, AssemblyError> {
        match self {
            Coupling::Identity => Ok(DMatrix::identity(ne, ne)),
            Coupling::Constant(m) => {
                if m.nrows() != ne || m.ncols() != ne {
                    return Err(AssemblyError::ShapeMismatch {
                        expected: ne,
                        got: m.nrows(),
                    });
                }
                Ok(m.clone())
            }
            Coupling::Diagonal(vals) => {
                if vals.len() != ne {
                    return Err(AssemblyError::ShapeMismatch {
                        expected: ne,
                        got: vals.len(),
                    });
                }
                Ok(DMatrix::from_diagonal(&DVector::from_vec(vals.clone())))
            }
        }
    }
}

/// Map from mesh nodes to global dofs. Non-flagged vertices come first in
/// file order, then the edge interiors.
#[derive(Debug, Clone)]
pub struct DofMap {
    /// Global dof of each vertex; `None` for flagged vertices.
    pub vertex_dof: Vec<Option<usize>>,
    /// Vertex index backing each of the leading dofs.
    pub vertex_of_dof: Vec<usize>,
    pub n_interior: usize,
    pub edge_count: usize,
    pub total: usize,
}

impl DofMap {
    pub fn new(graph: &Graph, mesh: &EdgeMesh) -> Self {
        let mut vertex_dof = vec![None; graph.vertex_count()];
        let mut vertex_of_dof = Vec::new();
        for (k, v) in graph.finite_vertices().into_iter().enumerate() {
            vertex_dof[v] = Some(k);
            vertex_of_dof.push(v);
        }
        let nv = vertex_of_dof.len();
        DofMap {
            vertex_dof,
            vertex_of_dof,
            n_interior: mesh.n,
            edge_count: graph.edge_count(),
            total: nv + graph.edge_count() * mesh.n,
        }
    }

    pub fn vertex_dofs(&self) -> usize {
        self.vertex_of_dof.len()
    }

    /// Global dof of interior point `i` (1-based) of edge `e`.
    pub fn interior(&self, e: usize, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n_interior);
        self.vertex_of_dof.len() + e * self.n_interior + (i - 1)
    }

    /// Global dofs of the `n + 2` mesh nodes of edge `e`; `None` marks an
    /// eliminated (flagged) endpoint.
    pub fn edge_nodes(&self, graph: &Graph, e: usize) -> Vec<Option<usize>> {
        let (from, to) = graph.endpoints(e);
        let mut nodes = Vec::with_capacity(self.n_interior + 2);
        nodes.push(self.vertex_dof[to]);
        for i in 1..=self.n_interior {
            nodes.push(Some(self.interior(e, i)));
        }
        nodes.push(self.vertex_dof[from]);
        nodes
    }

    /// Values of the dof vector at the mesh nodes of edge `e`, with zeros at
    /// eliminated endpoints.
    pub fn edge_values(&self, graph: &Graph, e: usize, u: &DVector<f64>) -> Vec<f64> {
        self.edge_nodes(graph, e)
            .into_iter()
            .map(|d| d.map_or(0.0, |k| u[k]))
            .collect()
    }
}

/// Discretization of the network form: stiffness with coupling, the node
/// matrix contribution, consistent and lumped mass.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub graph: Graph,
    pub mesh: EdgeMesh,
    pub dofs: DofMap,
    pub coupling: DMatrix<f64>,
    /// Principal part `sum_ij int c_ij psi_j' conj(psi_i')`.
    pub stiffness: DMatrix<f64>,
    /// `(M d | d')` contribution; the form subtracts it.
    pub node_term: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub lumped_mass: DVector<f64>,
    /// Gram matrix of the discrete H1 norm (Kirchhoff stiffness plus mass).
    pub h1_gram: DMatrix<f64>,
    pub node_matrix: Option<DMatrix<f64>>,
}

impl AssembledSystem {
    /// Full form matrix `A_h`: stiffness minus the node term.
    pub fn form_matrix(&self) -> DMatrix<f64> {
        &self.stiffness - &self.node_term
    }

    pub fn h(&self) -> f64 {
        self.mesh.h()
    }

    pub fn l2_norm(&self, u: &DVector<f64>) -> f64 {
        (u.dot(&(&self.mass * u))).max(0.0).sqrt()
    }

    pub fn h1_norm(&self, u: &DVector<f64>) -> f64 {
        (u.dot(&(&self.h1_gram * u))).max(0.0).sqrt()
    }
}

/// Assembles stiffness, node term and mass matrices for the given coupling
/// and node matrix (`M` indexed by non-flagged vertices in file order).
pub fn build(
    graph: &Graph,
    mesh: &EdgeMesh,
    coupling: &Coupling,
    node_matrix: Option<&DMatrix<f64>>,
) -> Result<AssembledSystem, AssemblyError> {
    assert!(mesh.n >= 1, "at least one interior point per edge");
    let ne = graph.edge_count();
    let c = coupling.to_matrix(ne)?;
    let dofs = DofMap::new(graph, mesh);
    let n = mesh.n;
    let h = mesh.h();
    let total = dofs.total;

    if let Some(m) = node_matrix {
        let nfin = dofs.vertex_dofs();
        if m.nrows() != nfin || m.ncols() != nfin {
            // A node matrix sized to all vertices would address flagged ones.
            if m.nrows() == graph.vertex_count() && graph.has_flagged() {
                let flagged = (0..graph.vertex_count())
                    .find(|&v| graph.is_flagged(v))
                    .unwrap();
                return Err(AssemblyError::FlaggedVertexInM(
                    graph.vertices()[flagged].id.0.clone(),
                ));
            }
            return Err(AssemblyError::ShapeMismatch {
                expected: nfin,
                got: m.nrows(),
            });
        }
    }

    let edge_nodes: Vec<Vec<Option<usize>>> = (0..ne).map(|e| dofs.edge_nodes(graph, e)).collect();

    // Element stiffness [[1,-1],[-1,1]]/h and mass h/6 [[2,1],[1,2]].
    let mut stiffness = DMatrix::zeros(total, total);
    let mut kirchhoff = DMatrix::zeros(total, total);
    for i in 0..ne {
        for j in 0..ne {
            let cij = c[(i, j)];
            if cij == 0.0 && i != j {
                continue;
            }
            for k in 0..=n {
                for (a, sa) in [(k, 1.0), (k + 1, -1.0)] {
                    for (b, sb) in [(k, 1.0), (k + 1, -1.0)] {
                        let (Some(p), Some(q)) = (edge_nodes[i][a], edge_nodes[j][b]) else {
                            continue;
                        };
                        let w = sa * sb / h;
                        stiffness[(p, q)] += cij * w;
                        if i == j {
                            kirchhoff[(p, q)] += w;
                        }
                    }
                }
            }
        }
    }

    let mut mass = DMatrix::zeros(total, total);
    let mut lumped = DVector::zeros(total);
    for nodes in &edge_nodes {
        for k in 0..=n {
            let local = [(nodes[k], 0), (nodes[k + 1], 1)];
            let el = [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]];
            for (pa, a) in local {
                let Some(p) = pa else { continue };
                lumped[p] += h / 2.0;
                for (qb, b) in local {
                    let Some(q) = qb else { continue };
                    mass[(p, q)] += el[a][b];
                }
            }
        }
    }

    let mut node_term = DMatrix::zeros(total, total);
    if let Some(m) = node_matrix {
        for k in 0..dofs.vertex_dofs() {
            for l in 0..dofs.vertex_dofs() {
                node_term[(k, l)] += m[(k, l)];
            }
        }
    }

    let h1_gram = &kirchhoff + &mass;

    Ok(AssembledSystem {
        graph: graph.clone(),
        mesh: *mesh,
        dofs,
        coupling: c,
        stiffness,
        node_term,
        mass,
        lumped_mass: lumped,
        h1_gram,
        node_matrix: node_matrix.cloned(),
    })
}

/// Discrete flux balance at each non-flagged vertex: the weighted incidence
/// pairing of one-sided edge derivatives against the node matrix term. A
/// near-zero residual certifies membership of `psi_h` in the discrete
/// operator domain.
pub fn kirchhoff_residual(
    sys: &AssembledSystem,
    u: &DVector<f64>,
) -> Result<DVector<f64>, AssemblyError> {
    if u.len() != sys.dofs.total {
        return Err(AssemblyError::ShapeMismatch {
            expected: sys.dofs.total,
            got: u.len(),
        });
    }
    let graph = &sys.graph;
    let ne = graph.edge_count();
    let h = sys.h();
    let n = sys.mesh.n;
    assert!(n >= 2, "one-sided three-point stencil needs n >= 2");

    // One-sided O(h^2) derivatives at both edge ends.
    let mut d_at_0 = vec![0.0; ne];
    let mut d_at_1 = vec![0.0; ne];
    for e in 0..ne {
        let vals = sys.dofs.edge_values(graph, e, u);
        let m = vals.len();
        d_at_0[e] = (-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * h);
        d_at_1[e] = (vals[m - 3] - 4.0 * vals[m - 2] + 3.0 * vals[m - 1]) / (2.0 * h);
    }

    let nfin = sys.dofs.vertex_dofs();
    let mut residual = DVector::zeros(nfin);
    for (k, &v) in sys.dofs.vertex_of_dof.iter().enumerate() {
        let mut flux = 0.0;
        for j in 0..ne {
            let (from, to) = graph.endpoints(j);
            if from == v {
                for i in 0..ne {
                    flux += sys.coupling[(j, i)] * d_at_1[i];
                }
            }
            if to == v {
                for i in 0..ne {
                    flux -= sys.coupling[(j, i)] * d_at_0[i];
                }
            }
        }
        if let Some(m) = &sys.node_matrix {
            for l in 0..nfin {
                flux -= m[(k, l)] * u[l];
            }
        }
        residual[k] = flux;
    }
    Ok(residual)
}

/// Samples per-edge data onto the dof vector, checking continuity at shared
/// vertices and zero values at flagged ones. `node_values` is indexed by the
/// non-flagged vertices in file order.
pub fn interpolate(
    graph: &Graph,
    mesh: &EdgeMesh,
    data: impl Fn(usize, f64) -> f64,
    node_values: &DVector<f64>,
) -> Result<DVector<f64>, AssemblyError> {
    let dofs = DofMap::new(graph, mesh);
    if node_values.len() != dofs.vertex_dofs() {
        return Err(AssemblyError::ShapeMismatch {
            expected: dofs.vertex_dofs(),
            got: node_values.len(),
        });
    }
    let tol = 1e-9;
    for e in 0..graph.edge_count() {
        let (from, to) = graph.endpoints(e);
        for (v, x) in [(to, 0.0), (from, 1.0)] {
            let val = data(e, x);
            match dofs.vertex_dof[v] {
                Some(k) => {
                    if (val - node_values[k]).abs() > tol {
                        return Err(AssemblyError::ContinuityViolation {
                            vertex: graph.vertices()[v].id.0.clone(),
                            left: node_values[k],
                            right: val,
                        });
                    }
                }
                None => {
                    if val.abs() > tol {
                        return Err(AssemblyError::FlaggedNonzero {
                            vertex: graph.vertices()[v].id.0.clone(),
                            value: val,
                        });
                    }
                }
            }
        }
    }
    let mut u = DVector::zeros(dofs.total);
    for k in 0..dofs.vertex_dofs() {
        u[k] = node_values[k];
    }
    let h = mesh.h();
    for e in 0..graph.edge_count() {
        for i in 1..=mesh.n {
            u[dofs.interior(e, i)] = data(e, i as f64 * h);
        }
    }
    Ok(u)
}

/// Piecewise-affine interpolant of a node vector: on each edge the values
/// run affinely from the `to` value at `x = 0` to the `from` value at
/// `x = 1` (zero at flagged vertices).
pub fn affine_interpolant(
    graph: &Graph,
    mesh: &EdgeMesh,
    node_values: &DVector<f64>,
) -> DVector<f64> {
    let dofs = DofMap::new(graph, mesh);
    let mut u = DVector::zeros(dofs.total);
    for k in 0..dofs.vertex_dofs() {
        u[k] = node_values[k];
    }
    let h = mesh.h();
    for e in 0..graph.edge_count() {
        let (from, to) = graph.endpoints(e);
        let v0 = dofs.vertex_dof[to].map_or(0.0, |k| node_values[k]);
        let v1 = dofs.vertex_dof[from].map_or(0.0, |k| node_values[k]);
        for i in 1..=mesh.n {
            let x = i as f64 * h;
            u[dofs.interior(e, i)] = v0 + x * (v1 - v0);
        }
    }
    u
}
