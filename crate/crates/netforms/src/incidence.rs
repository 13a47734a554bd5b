//! Incidence matrices as operators: norm bounds, the stacked boundary map
//! and an orthonormal basis of its range.
//!
//! The boundary map sends a node value vector `d` to the `2|E|` endpoint
//! values of the piecewise-affine function with those node values: the top
//! block selects the value at each edge's `x = 0` endpoint, the bottom block
//! at `x = 1`. Columns exist only for non-flagged vertices, so endpoint
//! values at flagged vertices are structurally zero.
//!
//! Density of the incidence operators and their transposes is automatic at
//! finite scale; only the `l2` operator-norm bound is operational here.

use nalgebra::{DMatrix, DVector};

use crate::error::GraphError;
use crate::graph::Graph;
use crate::linalg;

pub const RANK_TOL: f64 = 1e-12;
pub const SPAN_TOL: f64 = 1e-10;

/// The stacked boundary map of a graph: shape `2|E| x |V_fin|`.
#[derive(Debug, Clone)]
pub struct BoundaryMap {
    pub matrix: DMatrix<f64>,
    /// Vertex indices backing the columns, in file order.
    pub columns: Vec<usize>,
    pub edge_count: usize,
}

impl BoundaryMap {
    /// Row index of the `x = 0` slot of edge `e`.
    pub fn row_x0(&self, e: usize) -> usize {
        e
    }

    /// Row index of the `x = 1` slot of edge `e`.
    pub fn row_x1(&self, e: usize) -> usize {
        self.edge_count + e
    }

    /// Endpoint values of the piecewise-affine interpolant of the node
    /// vector `d` (indexed like `columns`).
    pub fn endpoint_values(&self, d: &DVector<f64>) -> DVector<f64> {
        &self.matrix * d
    }
}

/// Builds the boundary map of a loop-free graph.
pub fn boundary_map(graph: &Graph) -> Result<BoundaryMap, GraphError> {
    let inc = graph.incidence()?;
    let columns = graph.finite_vertices();
    let ne = graph.edge_count();
    let mut matrix = DMatrix::zeros(2 * ne, columns.len());
    for (j, &v) in columns.iter().enumerate() {
        for e in 0..ne {
            matrix[(e, j)] = inc.iplus[(v, e)];
            matrix[(ne + e, j)] = inc.iminus[(v, e)];
        }
    }
    Ok(BoundaryMap {
        matrix,
        columns,
        edge_count: ne,
    })
}

/// Report of the `l2` operator-norm check for the incidence matrices.
#[derive(Debug, Clone)]
pub struct OperatorNormCheck {
    /// Finite graphs are always uniformly locally finite.
    pub bounded: bool,
    pub max_deg_in: usize,
    pub max_deg_out: usize,
    pub sigma_max_in: f64,
    pub sigma_max_out: f64,
}

/// Largest singular values of the incidence matrices against the degree
/// bound `sigma_max(I+)^2 <= max deg+`.
pub fn operator_norm_check(graph: &Graph) -> Result<OperatorNormCheck, GraphError> {
    let inc = graph.incidence()?;
    let max_deg_in = (0..graph.vertex_count())
        .map(|v| graph.deg_in(v))
        .max()
        .unwrap_or(0);
    let max_deg_out = (0..graph.vertex_count())
        .map(|v| graph.deg_out(v))
        .max()
        .unwrap_or(0);
    let sigma_max_in = linalg::spectral_norm(&inc.iplus);
    let sigma_max_out = linalg::spectral_norm(&inc.iminus);
    debug_assert!(sigma_max_in <= (max_deg_in as f64).sqrt() + 1e-9);
    debug_assert!(sigma_max_out <= (max_deg_out as f64).sqrt() + 1e-9);
    Ok(OperatorNormCheck {
        bounded: true,
        max_deg_in,
        max_deg_out,
        sigma_max_in,
        sigma_max_out,
    })
}

/// Orthonormal basis of the range of a boundary map.
#[derive(Debug, Clone)]
pub struct RangeBasis {
    pub basis: DMatrix<f64>,
    pub rank: usize,
    pub tol: f64,
}

pub fn range_basis(bm: &BoundaryMap) -> RangeBasis {
    let basis = linalg::orthonormal_columns(&bm.matrix, RANK_TOL);
    let rank = basis.ncols();
    debug_assert!({
        let gram = basis.transpose() * &basis;
        (gram - DMatrix::identity(rank, rank)).norm() <= 1e-12 * (rank.max(1) as f64)
    });
    debug_assert!({
        let proj = &basis * basis.transpose();
        (&bm.matrix - proj * &bm.matrix).norm() <= SPAN_TOL
    });
    RangeBasis {
        basis,
        rank,
        tol: RANK_TOL,
    }
}
