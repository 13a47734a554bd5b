//! Admissibility of orthogonal projections, the orthogonality condition for
//! subspace invariance, invariant blocks, and restricted coercivity.
//!
//! A subspace `Y` of the edge space induces the space of Y-symmetric
//! functions (those with `psi(x) in Y` for a.e. `x`). Its projection is
//! admissible when projecting preserves node continuity; this is decided by
//! checking that the range of the boundary map is invariant under
//! `diag(P, P)`. The decision is pure linear algebra over the 0/1 boundary
//! matrix, so admissible and inadmissible instances are separated by many
//! orders of magnitude in residual.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::assembly::AssembledSystem;
use crate::error::SymmetryError;
use crate::graph::{EdgeId, EndpointSide, Graph, VertexId};
use crate::incidence::{boundary_map, range_basis};
use crate::linalg;

pub const PROJECTION_TOL: f64 = 1e-12;
pub const ADMISSIBILITY_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-9;

/// A subspace of the edge space, either as a named family or explicitly.
#[derive(Debug, Clone)]
pub enum SubspaceSpec {
    /// Span of the all-ones vector.
    Averaging,
    /// Block averaging over the per-layer edge blocks of a layer graph.
    LayerAveraging,
    /// Coordinate projection onto a set of edges.
    Coordinate(Vec<EdgeId>),
    /// Span of explicit vectors (need not be orthonormal).
    Span(Vec<Vec<f64>>),
    /// Explicit projection matrix.
    Matrix(DMatrix<f64>),
}

#[derive(Deserialize)]
struct ProjectionFile {
    kind: String,
    #[serde(default)]
    edges: Vec<String>,
    #[serde(default)]
    basis: Vec<Vec<f64>>,
    #[serde(default)]
    rows: Vec<Vec<f64>>,
}

impl SubspaceSpec {
    /// Parses the projection file format
    /// `{"kind":..., "edges":[...], "basis":[[...]], "rows":[[...]]}`.
    pub fn from_json(text: &str) -> Result<Self, SymmetryError> {
        let file: ProjectionFile = serde_json::from_str(text)
            .map_err(|e| SymmetryError::Graph(crate::error::GraphError::Parse(e.to_string())))?;
        match file.kind.as_str() {
            "averaging" => Ok(SubspaceSpec::Averaging),
            "layer_averaging" => Ok(SubspaceSpec::LayerAveraging),
            "coordinate" => Ok(SubspaceSpec::Coordinate(
                file.edges.into_iter().map(EdgeId).collect(),
            )),
            "span" => Ok(SubspaceSpec::Span(file.basis)),
            "matrix" => {
                let n = file.rows.len();
                let mut m = DMatrix::zeros(n, n);
                for (i, row) in file.rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(SymmetryError::DimensionMismatch {
                            expected: n,
                            got: row.len(),
                        });
                    }
                    for (j, &v) in row.iter().enumerate() {
                        m[(i, j)] = v;
                    }
                }
                Ok(SubspaceSpec::Matrix(m))
            }
            other => Err(SymmetryError::Graph(crate::error::GraphError::Parse(
                format!("unknown projection kind `{other}`"),
            ))),
        }
    }

    /// Resolves the spec to a validated orthogonal projection on the edge
    /// space of `graph`.
    pub fn resolve(&self, graph: &Graph) -> Result<DMatrix<f64>, SymmetryError> {
        let m = graph.edge_count();
        let p = match self {
            SubspaceSpec::Averaging => DMatrix::from_element(m, m, 1.0 / m as f64),
            SubspaceSpec::LayerAveraging => {
                let class = graph
                    .classify()
                    .map_err(SymmetryError::Graph)?;
                let Some(layers) = class.layer else {
                    return Err(SymmetryError::Graph(crate::error::GraphError::Parse(
                        "graph has no layer structure".into(),
                    )));
                };
                let mut p = DMatrix::zeros(m, m);
                for block in 0..layers.count {
                    let members: Vec<usize> = (0..m)
                        .filter(|&e| layers.edge_layers[e] == block)
                        .collect();
                    if members.is_empty() {
                        continue;
                    }
                    let w = 1.0 / members.len() as f64;
                    for &i in &members {
                        for &j in &members {
                            p[(i, j)] = w;
                        }
                    }
                }
                p
            }
            SubspaceSpec::Coordinate(edges) => {
                let mut p = DMatrix::zeros(m, m);
                for id in edges {
                    let e = graph
                        .edge_position(id)
                        .ok_or_else(|| SymmetryError::Graph(
                            crate::error::GraphError::UnknownEdge(id.0.clone()),
                        ))?;
                    p[(e, e)] = 1.0;
                }
                p
            }
            SubspaceSpec::Span(vectors) => {
                if vectors.is_empty() {
                    return Ok(DMatrix::zeros(m, m));
                }
                for v in vectors {
                    if v.len() != m {
                        return Err(SymmetryError::DimensionMismatch {
                            expected: m,
                            got: v.len(),
                        });
                    }
                }
                let raw = DMatrix::from_fn(m, vectors.len(), |i, j| vectors[j][i]);
                let q = linalg::orthonormal_columns(&raw, PROJECTION_TOL);
                &q * q.transpose()
            }
            SubspaceSpec::Matrix(p) => p.clone(),
        };
        if p.nrows() != m || p.ncols() != m {
            return Err(SymmetryError::DimensionMismatch {
                expected: m,
                got: p.nrows(),
            });
        }
        let idem = (&p * &p - &p).norm();
        let sym = (&p - p.transpose()).norm();
        let residual = idem.max(sym);
        if residual > PROJECTION_TOL * (m as f64).max(1.0) {
            return Err(SymmetryError::NotAProjection { residual });
        }
        Ok(p)
    }
}

/// Witness of an inadmissible projection: a node vector whose interpolant
/// projects to a function that breaks continuity at `vertex`.
#[derive(Debug, Clone)]
pub struct Witness {
    /// Node values indexed by the non-flagged vertices in file order.
    pub node_vector: DVector<f64>,
    pub vertex: VertexId,
    pub violation: f64,
    /// Projected endpoint values at x = 0 per edge.
    pub projected_x0: DVector<f64>,
    /// Projected endpoint values at x = 1 per edge.
    pub projected_x1: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    /// Max over range-basis vectors of the out-of-range component of the
    /// projected vector.
    pub residual: f64,
    pub tol: f64,
    pub witness: Option<Witness>,
    /// The characterization is stated for connected graphs; on disconnected
    /// input the same range condition is evaluated but flagged.
    pub disconnected: bool,
}

/// Decides admissibility of `P_Y` by invariance of the boundary-map range
/// under `diag(P_Y, P_Y)`.
pub fn admissible(
    graph: &Graph,
    spec: &SubspaceSpec,
    tol: f64,
) -> Result<AdmissibilityVerdict, SymmetryError> {
    let p = spec.resolve(graph)?;
    admissible_projection(graph, &p, tol)
}

pub fn admissible_projection(
    graph: &Graph,
    p: &DMatrix<f64>,
    tol: f64,
) -> Result<AdmissibilityVerdict, SymmetryError> {
    let m = graph.edge_count();
    if p.nrows() != m {
        return Err(SymmetryError::DimensionMismatch {
            expected: m,
            got: p.nrows(),
        });
    }
    let bm = boundary_map(graph).map_err(SymmetryError::Graph)?;
    let rb = range_basis(&bm);
    let phat = stack_projection(p);
    let mut residual = 0.0f64;
    let mut worst_col = 0usize;
    for j in 0..rb.basis.ncols() {
        let b = rb.basis.column(j).into_owned();
        let pb = &phat * &b;
        let out = &pb - &rb.basis * (rb.basis.transpose() * &pb);
        let r = out.norm();
        if r > residual {
            residual = r;
            worst_col = j;
        }
    }
    let admissible = residual <= tol;
    let witness = if admissible {
        None
    } else {
        Some(synthesize_witness(graph, p, &bm, &rb.basis, worst_col, tol))
    };
    Ok(AdmissibilityVerdict {
        admissible,
        residual,
        tol,
        witness,
        disconnected: !graph.is_connected(),
    })
}

/// `diag(P, P)` acting on stacked endpoint values.
fn stack_projection(p: &DMatrix<f64>) -> DMatrix<f64> {
    let m = p.nrows();
    let mut phat = DMatrix::zeros(2 * m, 2 * m);
    phat.view_mut((0, 0), (m, m)).copy_from(p);
    phat.view_mut((m, m), (m, m)).copy_from(p);
    phat
}

/// Projected endpoint values of the affine interpolant of a node vector:
/// `(P psi(0), P psi(1))` per edge.
pub fn projected_profile(
    graph: &Graph,
    p: &DMatrix<f64>,
    node_vector: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>), SymmetryError> {
    let bm = boundary_map(graph).map_err(SymmetryError::Graph)?;
    if node_vector.len() != bm.columns.len() {
        return Err(SymmetryError::DimensionMismatch {
            expected: bm.columns.len(),
            got: node_vector.len(),
        });
    }
    let vals = bm.endpoint_values(node_vector);
    let m = graph.edge_count();
    let x0 = DVector::from(vals.rows(0, m));
    let x1 = DVector::from(vals.rows(m, m));
    Ok((p * x0, p * x1))
}

/// Worst continuity violation of the projected endpoint values over all
/// vertices: slots at a non-flagged vertex must agree, slots at a flagged
/// vertex must vanish.
fn continuity_violation(
    graph: &Graph,
    px0: &DVector<f64>,
    px1: &DVector<f64>,
) -> (f64, usize) {
    let mut worst = (0.0f64, 0usize);
    for v in 0..graph.vertex_count() {
        let slots: Vec<f64> = graph
            .incident(v)
            .into_iter()
            .map(|(e, side)| match side {
                EndpointSide::X0 => px0[e],
                EndpointSide::X1 => px1[e],
            })
            .collect();
        if slots.is_empty() {
            continue;
        }
        let violation = if graph.is_flagged(v) {
            slots.iter().fold(0.0f64, |a, &s| a.max(s.abs()))
        } else {
            let max = slots.iter().fold(f64::NEG_INFINITY, |a, &s| a.max(s));
            let min = slots.iter().fold(f64::INFINITY, |a, &s| a.min(s));
            max - min
        };
        if violation > worst.0 {
            worst = (violation, v);
        }
    }
    worst
}

fn synthesize_witness(
    graph: &Graph,
    p: &DMatrix<f64>,
    bm: &crate::incidence::BoundaryMap,
    basis: &DMatrix<f64>,
    worst_col: usize,
    tol: f64,
) -> Witness {
    // The violating basis vector lies in the range, so a node vector mapping
    // onto it exists; solve in the least-squares sense.
    let b = basis.column(worst_col).into_owned();
    let svd = bm.matrix.clone().svd(true, true);
    let mut d = svd.solve(&b, 1e-12).expect("least squares");
    let n = d.norm();
    if n > 0.0 {
        d /= n;
    }
    let (px0, px1) = projected_profile(graph, p, &d).expect("profile");
    let (mut violation, vertex) = continuity_violation(graph, &px0, &px1);
    let mut witness = Witness {
        node_vector: d,
        vertex: graph.vertices()[vertex].id.clone(),
        violation,
        projected_x0: px0,
        projected_x1: px1,
    };
    // Rescale so the violation clears the decision tolerance by 10x.
    if violation > 0.0 && violation < 10.0 * tol {
        let s = 20.0 * tol / violation;
        witness.node_vector *= s;
        witness.projected_x0 *= s;
        witness.projected_x1 *= s;
        violation *= s;
        witness.violation = violation;
    }
    witness
}

/// Definitional cross-check of admissibility: samples node vectors, applies
/// the projection pointwise to the affine interpolant and checks node
/// continuity (zero values at flagged vertices). The canonical node vectors
/// and the all-ones vector are always probed before the seeded random ones.
pub fn oracle_admissible(
    graph: &Graph,
    spec: &SubspaceSpec,
    samples: usize,
    seed: u64,
) -> Result<bool, SymmetryError> {
    assert!(samples >= 1, "at least one sample");
    let p = spec.resolve(graph)?;
    let nfin = graph.finite_vertices().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes: Vec<DVector<f64>> = Vec::new();
    for k in 0..nfin {
        let mut d = DVector::zeros(nfin);
        d[k] = 1.0;
        probes.push(d);
    }
    probes.push(DVector::from_element(nfin, 1.0));
    for _ in 0..samples {
        probes.push(DVector::from_fn(nfin, |_, _| rng.random_range(-1.0..1.0)));
    }
    for d in &probes {
        let (px0, px1) = projected_profile(graph, &p, d)?;
        let (violation, _) = continuity_violation(graph, &px0, &px1);
        if violation > ORACLE_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Necessary condition for admissibility on a connected graph: the all-ones
/// vector must be an eigenvector of `P_Y`.
pub fn one_eigenvector_check(graph: &Graph, spec: &SubspaceSpec) -> Result<bool, SymmetryError> {
    if !graph.is_connected() {
        return Err(SymmetryError::GraphDisconnected);
    }
    let p = spec.resolve(graph)?;
    let m = graph.edge_count();
    let ones = DVector::from_element(m, 1.0);
    let image = &p * &ones;
    let lambda = image.dot(&ones) / m as f64;
    let dev = (&image - lambda * &ones).norm();
    Ok(dev <= 1e-10 * (m as f64).sqrt())
}

/// Report of the orthogonality condition for invariance.
#[derive(Debug, Clone)]
pub struct OrthogonalityReport {
    /// Exact verdict `(id - P) C P = 0`, available for edgewise-constant
    /// coupling (the node matrix term enters only the discrete residual).
    pub exact: Option<bool>,
    /// `|| Q_h A_h P_h ||_F` on the assembled system.
    pub discrete_residual: f64,
}

/// Checks the orthogonality condition `a(psi, psi') = 0` across `Y` and its
/// complement: exactly on the coupling matrix, and discretely on the
/// assembled form matrix.
pub fn orthogonality_check(
    spec: &SubspaceSpec,
    sys: &AssembledSystem,
    tol: f64,
) -> Result<OrthogonalityReport, SymmetryError> {
    let p = spec.resolve(&sys.graph)?;
    let m = sys.graph.edge_count();
    if sys.coupling.nrows() != m {
        return Err(SymmetryError::DimensionMismatch {
            expected: m,
            got: sys.coupling.nrows(),
        });
    }
    let q = DMatrix::identity(m, m) - &p;
    let exact = Some((&q * &sys.coupling * &p).amax() <= tol);
    let ph = discretize_projection(sys, &p);
    let a = sys.form_matrix();
    let qh = DMatrix::identity(ph.nrows(), ph.ncols()) - &ph;
    let discrete_residual = (&qh * &a * &ph).norm();
    Ok(OrthogonalityReport {
        exact,
        discrete_residual,
    })
}

/// Matrix of the pointwise projection on the P1 dof space. Interior dofs mix
/// the same mesh point across edges; a vertex dof receives the mean of the
/// projected endpoint values over its slots (they agree exactly when the
/// projection is admissible).
pub fn discretize_projection(sys: &AssembledSystem, p: &DMatrix<f64>) -> DMatrix<f64> {
    let graph = &sys.graph;
    let dofs = &sys.dofs;
    let m = graph.edge_count();
    let n = sys.mesh.n;
    let total = dofs.total;
    let mut ph = DMatrix::zeros(total, total);
    for e in 0..m {
        for i in 1..=n {
            let row = dofs.interior(e, i);
            for j in 0..m {
                if p[(e, j)] != 0.0 {
                    ph[(row, dofs.interior(j, i))] += p[(e, j)];
                }
            }
        }
    }
    for (k, &v) in dofs.vertex_of_dof.iter().enumerate() {
        let slots = graph.incident(v);
        let w = 1.0 / slots.len() as f64;
        for (e, side) in slots {
            for j in 0..m {
                let c = p[(e, j)];
                if c == 0.0 {
                    continue;
                }
                let (from, to) = graph.endpoints(j);
                let endpoint = match side {
                    EndpointSide::X0 => to,
                    EndpointSide::X1 => from,
                };
                if let Some(col) = dofs.vertex_dof[endpoint] {
                    ph[(k, col)] += w * c;
                }
            }
        }
    }
    ph
}

/// Partition of an index set into invariant blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    pub blocks: Vec<Vec<usize>>,
}

/// Invariant blocks of a square matrix: connected components of the support
/// graph of `A + A^T` above `tol`.
pub fn invariant_blocks(a: &DMatrix<f64>, tol: f64) -> BlockPartition {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && (a[(i, j)].abs() > tol || a[(j, i)].abs() > tol) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = by_root.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    BlockPartition { blocks }
}

/// Nodes of a generalized form domain: the invariant blocks of a projection
/// of the `2|E|`-dimensional endpoint space.
pub fn nodes_from_boundary_subspace(p: &DMatrix<f64>) -> Result<BlockPartition, SymmetryError> {
    if p.nrows() != p.ncols() {
        return Err(SymmetryError::DimensionMismatch {
            expected: p.nrows(),
            got: p.ncols(),
        });
    }
    let idem = (p * p - p).norm();
    let sym = (p - p.transpose()).norm();
    let residual = idem.max(sym);
    if residual > PROJECTION_TOL * (p.nrows() as f64).max(1.0) {
        return Err(SymmetryError::NotAProjection { residual });
    }
    Ok(invariant_blocks(p, PROJECTION_TOL))
}

/// Projection of the endpoint space onto the span of the per-vertex slot
/// indicators: the boundary subspace that encodes this graph's vertex
/// identifications.
pub fn vertex_identification_projection(graph: &Graph) -> DMatrix<f64> {
    let m = graph.edge_count();
    let mut p = DMatrix::zeros(2 * m, 2 * m);
    for v in 0..graph.vertex_count() {
        if graph.is_flagged(v) {
            continue;
        }
        let slots: Vec<usize> = graph
            .incident(v)
            .into_iter()
            .map(|(e, side)| match side {
                EndpointSide::X0 => e,
                EndpointSide::X1 => m + e,
            })
            .collect();
        let w = 1.0 / slots.len() as f64;
        for &i in &slots {
            for &j in &slots {
                p[(i, j)] += w;
            }
        }
    }
    p
}

/// Largest coercivity constant of the form restricted to the discretized
/// Y-symmetric subspace, measured in the discrete H1 norm.
#[derive(Debug, Clone)]
pub struct RestrictedCoercivity {
    pub alpha_est: f64,
    pub subspace_dim: usize,
}

pub fn restricted_coercivity(
    sys: &AssembledSystem,
    spec: &SubspaceSpec,
) -> Result<RestrictedCoercivity, SymmetryError> {
    let p = spec.resolve(&sys.graph)?;
    if p.amax() == 0.0 {
        // The zero subspace makes the condition vacuous.
        return Ok(RestrictedCoercivity {
            alpha_est: f64::INFINITY,
            subspace_dim: 0,
        });
    }
    let verdict = admissible_projection(&sys.graph, &p, ADMISSIBILITY_TOL)?;
    if !verdict.admissible {
        return Err(SymmetryError::InadmissibleSubspace);
    }
    let ph = discretize_projection(sys, &p);
    let z = linalg::orthonormal_columns(&ph, 1e-10);
    let dim = z.ncols();
    if dim == 0 {
        return Ok(RestrictedCoercivity {
            alpha_est: f64::INFINITY,
            subspace_dim: 0,
        });
    }
    let a = sys.form_matrix();
    let reduced_a = z.transpose() * &a * &z;
    let reduced_g = z.transpose() * &sys.h1_gram * &z;
    let alpha = linalg::pencil_min_eig(&reduced_a, &reduced_g)
        .expect("reduced Gram is positive definite");
    Ok(RestrictedCoercivity {
        alpha_est: alpha,
        subspace_dim: dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{build, Coupling, EdgeMesh};
    use crate::graph::Graph;

    fn cycle3() -> Graph {
        Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v4")]).unwrap()
    }

    /// The bipartite 3-line with the drawn parametrization: e1 ends at v1,
    /// e1 and e2 start at v2... (x = 1 endpoints are `from`).
    fn bipartite_line() -> Graph {
        Graph::from_edges(&[("e1", "v2", "v1"), ("e2", "v2", "v3"), ("e3", "v4", "v3")]).unwrap()
    }

    #[test]
    fn averaging_is_admissible_on_eulerian_cycles() {
        let v = admissible(&cycle3(), &SubspaceSpec::Averaging, ADMISSIBILITY_TOL).unwrap();
        assert!(v.admissible, "residual {}", v.residual);
        assert!(v.residual < 1e-12);
    }

    #[test]
    fn averaging_is_inadmissible_on_the_directed_path() {
        let v = admissible(&path3(), &SubspaceSpec::Averaging, ADMISSIBILITY_TOL).unwrap();
        assert!(!v.admissible);
        assert!(v.residual > 1e-6);
        let w = v.witness.expect("witness");
        assert!(w.violation > 1e-6);
    }

    #[test]
    fn identity_projection_is_always_admissible() {
        for g in [cycle3(), path3(), bipartite_line()] {
            let m = g.edge_count();
            let v = admissible(
                &g,
                &SubspaceSpec::Matrix(DMatrix::identity(m, m)),
                ADMISSIBILITY_TOL,
            )
            .unwrap();
            assert!(v.admissible);
            assert!(v.residual < 1e-14);
        }
    }

    #[test]
    fn bipartite_line_even_projection_reproduces_the_failing_profile() {
        // Projection onto span{e1 + e3, e2}: the reflection-symmetric
        // subspace of the line.
        let g = bipartite_line();
        let p = SubspaceSpec::Span(vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]])
            .resolve(&g)
            .unwrap();
        let v = admissible_projection(&g, &p, ADMISSIBILITY_TOL).unwrap();
        assert!(!v.admissible);

        // psi(x) = (x, x, 0): node vector is the indicator of v2.
        let k = g.finite_vertices()
            .iter()
            .position(|&v| g.vertices()[v].id.0 == "v2")
            .unwrap();
        let mut d = DVector::zeros(4);
        d[k] = 1.0;
        let (px0, px1) = projected_profile(&g, &p, &d).unwrap();
        // Projected function is (x/2, x, x/2).
        assert!(px0.amax() < 1e-14);
        assert!((px1[0] - 0.5).abs() < 1e-14);
        assert!((px1[1] - 1.0).abs() < 1e-14);
        assert!((px1[2] - 0.5).abs() < 1e-14);
        let (violation, vertex) = continuity_violation(&g, &px0, &px1);
        assert!((violation - 0.5).abs() < 1e-14);
        assert_eq!(g.vertices()[vertex].id.0, "v2");
    }

    #[test]
    fn directed_cycle_pair_averaging_is_inadmissible_with_the_printed_profile() {
        // Averaging over {e1, e2} plus identity on e3, on a directed
        // 3-cycle; psi(x) = (x, 1 - x, 0).
        let g = Graph::from_edges(&[("e1", "v2", "v1"), ("e2", "v3", "v2"), ("e3", "v1", "v3")])
            .unwrap();
        let p = DMatrix::from_row_slice(
            3,
            3,
            &[0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 1.0],
        );
        let v = admissible_projection(&g, &p, ADMISSIBILITY_TOL).unwrap();
        assert!(!v.admissible);
        // One-eigenvector necessary condition still holds (P 1 = 1).
        let ok = one_eigenvector_check(&g, &SubspaceSpec::Matrix(p.clone())).unwrap();
        assert!(ok);
        // d = indicator of v2: psi = (x, 1 - x, 0).
        let k = g.finite_vertices()
            .iter()
            .position(|&v| g.vertices()[v].id.0 == "v2")
            .unwrap();
        let mut d = DVector::zeros(3);
        d[k] = 1.0;
        let (px0, px1) = projected_profile(&g, &p, &d).unwrap();
        for e in 0..2 {
            assert!((px0[e] - 0.5).abs() < 1e-14);
            assert!((px1[e] - 0.5).abs() < 1e-14);
        }
        assert!(px0[2].abs() < 1e-14);
        assert!(px1[2].abs() < 1e-14);
    }

    #[test]
    fn oracle_agrees_on_the_textbook_cases() {
        assert!(oracle_admissible(&cycle3(), &SubspaceSpec::Averaging, 50, 7).unwrap());
        assert!(!oracle_admissible(&path3(), &SubspaceSpec::Averaging, 50, 7).unwrap());
        // Zero subspace: projection of anything is zero, always continuous.
        let zero = SubspaceSpec::Span(vec![]);
        assert!(oracle_admissible(&path3(), &zero, 10, 7).unwrap());
    }

    #[test]
    fn one_eigenvector_check_flags_coordinate_projections() {
        let g = Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3")]).unwrap();
        let coord = SubspaceSpec::Coordinate(vec![EdgeId("e1".into())]);
        assert!(!one_eigenvector_check(&g, &coord).unwrap());
        assert!(one_eigenvector_check(&g, &SubspaceSpec::Averaging).unwrap());
    }

    #[test]
    fn disconnected_graph_is_rejected_by_the_eigenvector_check() {
        let g = Graph::from_edges(&[("e1", "a", "b"), ("e2", "c", "d")]).unwrap();
        assert_eq!(
            one_eigenvector_check(&g, &SubspaceSpec::Averaging).unwrap_err(),
            SymmetryError::GraphDisconnected
        );
    }

    #[test]
    fn embedding_an_inadmissible_block_stays_inadmissible() {
        // Bipartite-line block plus two disjoint extra edges.
        let g = Graph::from_edges(&[
            ("e1", "v2", "v1"),
            ("e2", "v2", "v3"),
            ("e3", "v4", "v3"),
            ("x1", "a1", "a2"),
            ("x2", "b1", "b2"),
        ])
        .unwrap();
        let mut p = DMatrix::identity(5, 5);
        let block = [
            [0.5, 0.0, 0.5],
            [0.0, 1.0, 0.0],
            [0.5, 0.0, 0.5],
        ];
        for i in 0..3 {
            for j in 0..3 {
                p[(i, j)] = block[i][j];
            }
        }
        let v = admissible_projection(&g, &p, ADMISSIBILITY_TOL).unwrap();
        assert!(!v.admissible);
    }

    #[test]
    fn verdicts_do_not_depend_on_the_spanning_basis() {
        let g = bipartite_line();
        let a = SubspaceSpec::Span(vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]);
        // Same span, rotated basis.
        let c = 0.6_f64;
        let s = 0.8_f64;
        let b = SubspaceSpec::Span(vec![
            vec![c, s, c],
            vec![-s * std::f64::consts::FRAC_1_SQRT_2, c, -s * std::f64::consts::FRAC_1_SQRT_2],
        ]);
        let va = admissible(&g, &a, ADMISSIBILITY_TOL).unwrap();
        let vb = admissible(&g, &b, ADMISSIBILITY_TOL).unwrap();
        assert_eq!(va.admissible, vb.admissible);
        assert!((va.residual - vb.residual).abs() < 1e-12);
    }

    #[test]
    fn invariant_blocks_of_block_diagonal_matrices() {
        let mut a = DMatrix::zeros(5, 5);
        for i in 0..2 {
            for j in 0..2 {
                a[(i, j)] = 1.0;
            }
        }
        for i in 2..5 {
            for j in 2..5 {
                a[(i, j)] = 0.5;
            }
        }
        let p = invariant_blocks(&a, 1e-12);
        assert_eq!(p.blocks, vec![vec![0, 1], vec![2, 3, 4]]);

        let full = DMatrix::from_element(3, 3, 1.0);
        assert_eq!(invariant_blocks(&full, 1e-12).blocks.len(), 1);

        // span{(1,1,0,0)/sqrt2} + span{e3} within dimension 4.
        let mut p4 = DMatrix::zeros(4, 4);
        p4[(0, 0)] = 0.5;
        p4[(0, 1)] = 0.5;
        p4[(1, 0)] = 0.5;
        p4[(1, 1)] = 0.5;
        p4[(2, 2)] = 1.0;
        let blocks = invariant_blocks(&p4, 1e-12).blocks;
        assert_eq!(blocks, vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn boundary_subspace_recovers_vertex_identifications() {
        let g = crate::graph::figure1_graph();
        let p = vertex_identification_projection(&g);
        let blocks = nodes_from_boundary_subspace(&p).unwrap();
        assert_eq!(blocks.blocks.len(), 4);

        let full = DMatrix::identity(10, 10);
        assert_eq!(nodes_from_boundary_subspace(&full).unwrap().blocks.len(), 10);
        let zero = DMatrix::zeros(10, 10);
        assert_eq!(nodes_from_boundary_subspace(&zero).unwrap().blocks.len(), 10);
    }

    #[test]
    fn orthogonality_kirchhoff_and_coupled_cases() {
        let g = cycle3();
        let sys = build(&g, &EdgeMesh { n: 6 }, &Coupling::Identity, None).unwrap();
        let rep = orthogonality_check(&SubspaceSpec::Averaging, &sys, 1e-12).unwrap();
        assert_eq!(rep.exact, Some(true));
        assert!(rep.discrete_residual < 1e-10, "{}", rep.discrete_residual);

        // Commuting construction: C = P + 2 (id - P).
        let p = SubspaceSpec::Averaging.resolve(&g).unwrap();
        let c = &p + (DMatrix::identity(3, 3) - &p) * 2.0;
        let sys2 = build(&g, &EdgeMesh { n: 6 }, &Coupling::Constant(c), None).unwrap();
        let rep2 = orthogonality_check(&SubspaceSpec::Averaging, &sys2, 1e-12).unwrap();
        assert_eq!(rep2.exact, Some(true));
        assert!(rep2.discrete_residual < 1e-10);
    }

    #[test]
    fn orthogonality_detects_cross_coupling() {
        // Two parallel edges with a coupling that maps Y into its complement.
        let g = Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v1", "v2")]).unwrap();
        let mut c = DMatrix::identity(2, 2);
        c[(0, 1)] = 0.5;
        let sys = build(&g, &EdgeMesh { n: 6 }, &Coupling::Constant(c), None).unwrap();
        let rep = orthogonality_check(&SubspaceSpec::Averaging, &sys, 1e-12).unwrap();
        assert_eq!(rep.exact, Some(false));
        assert!(rep.discrete_residual > 1e-3);
    }

    #[test]
    fn restricted_coercivity_on_the_dirichlet_edge() {
        let g = Graph::from_edges_flagged(&[("e1", "a", "b")], &["a", "b"]).unwrap();
        let sys = build(&g, &EdgeMesh { n: 256 }, &Coupling::Identity, None).unwrap();
        let full = SubspaceSpec::Matrix(DMatrix::identity(1, 1));
        let rc = restricted_coercivity(&sys, &full).unwrap();
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let expected = pi2 / (1.0 + pi2);
        assert!(
            (rc.alpha_est - expected).abs() < 0.05 * expected,
            "alpha {} vs {}",
            rc.alpha_est,
            expected
        );
    }

    #[test]
    fn restricted_coercivity_edge_cases() {
        let g = cycle3();
        let sys = build(&g, &EdgeMesh { n: 8 }, &Coupling::Identity, None).unwrap();
        let zero = restricted_coercivity(&sys, &SubspaceSpec::Span(vec![])).unwrap();
        assert!(zero.alpha_est.is_infinite());

        // Constants lie in the averaging subspace and the form vanishes there.
        let avg = restricted_coercivity(&sys, &SubspaceSpec::Averaging).unwrap();
        assert!(avg.alpha_est.abs() < 1e-9, "alpha {}", avg.alpha_est);

        let inadmissible = restricted_coercivity(
            &build(&path3(), &EdgeMesh { n: 8 }, &Coupling::Identity, None).unwrap(),
            &SubspaceSpec::Averaging,
        );
        assert_eq!(
            inadmissible.unwrap_err(),
            SymmetryError::InadmissibleSubspace
        );
    }

    #[test]
    fn decomp_dimension_count_holds_for_admissible_projections() {
        // Compression of diag(P, P) to the range of the boundary map is a
        // projection exactly when admissible; its trace counts the range
        // part of the splitting.
        let g = cycle3();
        let p = SubspaceSpec::Averaging.resolve(&g).unwrap();
        let bm = boundary_map(&g).unwrap();
        let rb = range_basis(&bm);
        let phat = stack_projection(&p);
        let s = rb.basis.transpose() * &phat * &rb.basis;
        let idem = (&s * &s - &s).norm();
        assert!(idem < 1e-12, "compression is a projection: {idem}");
        let r = rb.rank;
        let dim_range = s.trace().round() as usize;
        let eigs = s.symmetric_eigen().eigenvalues;
        let near01 = eigs.iter().all(|&l| l.abs() < 1e-9 || (l - 1.0).abs() < 1e-9);
        assert!(near01);
        let dim_ker = eigs.iter().filter(|&&l| l.abs() < 1e-9).count();
        assert_eq!(dim_ker + dim_range, r);
    }

    #[test]
    fn projection_validation_errors() {
        let g = cycle3();
        let not_proj = SubspaceSpec::Matrix(DMatrix::from_row_slice(
            3,
            3,
            &[0.5, 0.5, 0.0, 0.0, 0.0, 1.0, 0.5, 0.5, 0.0],
        ));
        assert!(matches!(
            not_proj.resolve(&g),
            Err(SymmetryError::NotAProjection { .. })
        ));
        let wrong_dim = SubspaceSpec::Matrix(DMatrix::identity(2, 2));
        assert!(matches!(
            wrong_dim.resolve(&g),
            Err(SymmetryError::DimensionMismatch { .. })
        ));
    }
}
