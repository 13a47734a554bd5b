//! Finite directed graphs with infinite-degree markers.
//!
//! A graph here is combinatorial: labelled vertices and labelled oriented
//! edges given by an endpoint map. The metric structure (every edge a copy
//! of `[0,1]`) enters through a fixed coordinate convention: the arrow's
//! terminal endpoint (`to`) carries the parameter `x = 0`, the initial
//! endpoint (`from`) carries `x = 1`. Every module of this crate reads
//! endpoint values through this convention and never re-derives it.
//!
//! A vertex flagged `infinite` models a vertex of infinite degree at desk
//! scale: it is excluded from the node value vector, which forces Dirichlet
//! values there.

use std::collections::{HashMap, HashSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Opaque vertex label, unique within a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub String);

/// Opaque edge label, unique within a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub String);

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    /// Models `deg(v) = infinity`; such vertices carry no node value.
    #[serde(default)]
    pub infinite: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
}

/// Validated directed graph. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Graph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    /// Per edge: (index of `from`, index of `to`).
    endpoints: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct GraphFile {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl Graph {
    /// Validates and builds a graph from vertex and edge lists.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if vertices.is_empty() || edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut vertex_index = HashMap::new();
        for (k, v) in vertices.iter().enumerate() {
            if v.id.0.is_empty() {
                return Err(GraphError::Parse("empty vertex id".into()));
            }
            if vertex_index.insert(v.id.0.clone(), k).is_some() {
                return Err(GraphError::DuplicateId(v.id.0.clone()));
            }
        }
        let mut edge_index = HashMap::new();
        let mut endpoints = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.id.0.is_empty() {
                return Err(GraphError::Parse("empty edge id".into()));
            }
            if edge_index.insert(e.id.0.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(e.id.0.clone()));
            }
            let from = *vertex_index
                .get(&e.from.0)
                .ok_or_else(|| GraphError::DanglingEndpoint {
                    edge: e.id.0.clone(),
                    vertex: e.from.0.clone(),
                })?;
            let to = *vertex_index
                .get(&e.to.0)
                .ok_or_else(|| GraphError::DanglingEndpoint {
                    edge: e.id.0.clone(),
                    vertex: e.to.0.clone(),
                })?;
            endpoints.push((from, to));
        }
        Ok(Graph {
            vertices,
            edges,
            vertex_index,
            edge_index,
            endpoints,
        })
    }

    /// Parses the JSON graph file format:
    /// `{"vertices":[{"id":..,"infinite":..}],"edges":[{"id":..,"from":..,"to":..}]}`.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        Graph::new(file.vertices, file.edges)
    }

    /// Convenience constructor for tests and built-in fixtures: all vertices
    /// unflagged, edges given as `(id, from, to)`. Vertices are created in
    /// order of first appearance.
    pub fn from_edges(edges: &[(&str, &str, &str)]) -> Result<Self, GraphError> {
        Self::from_edges_flagged(edges, &[])
    }

    /// Like [`Graph::from_edges`] with a set of vertex ids flagged infinite.
    pub fn from_edges_flagged(
        edges: &[(&str, &str, &str)],
        flagged: &[&str],
    ) -> Result<Self, GraphError> {
        let mut seen = HashSet::new();
        let mut vertices = Vec::new();
        for &(_, from, to) in edges {
            for v in [from, to] {
                if seen.insert(v.to_string()) {
                    vertices.push(Vertex {
                        id: VertexId(v.to_string()),
                        infinite: flagged.contains(&v),
                    });
                }
            }
        }
        let edges = edges
            .iter()
            .map(|&(id, from, to)| Edge {
                id: EdgeId(id.to_string()),
                from: VertexId(from.to_string()),
                to: VertexId(to.to_string()),
            })
            .collect();
        Graph::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_position(&self, id: &VertexId) -> Option<usize> {
        self.vertex_index.get(&id.0).copied()
    }

    pub fn edge_position(&self, id: &EdgeId) -> Option<usize> {
        self.edge_index.get(&id.0).copied()
    }

    /// `(from, to)` vertex indices of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.endpoints[e]
    }

    pub fn is_flagged(&self, v: usize) -> bool {
        self.vertices[v].infinite
    }

    pub fn has_flagged(&self) -> bool {
        self.vertices.iter().any(|v| v.infinite)
    }

    /// Indices of the non-flagged vertices in file order; these are the
    /// vertices carrying a node value.
    pub fn finite_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| !self.vertices[v].infinite)
            .collect()
    }

    pub fn has_loops(&self) -> bool {
        self.endpoints.iter().any(|&(f, t)| f == t)
    }

    /// Incoming degree: number of edges ending at `v` (loops count once here,
    /// once in the outgoing degree).
    pub fn deg_in(&self, v: usize) -> usize {
        self.endpoints.iter().filter(|&&(_, t)| t == v).count()
    }

    /// Outgoing degree: number of edges starting at `v`.
    pub fn deg_out(&self, v: usize) -> usize {
        self.endpoints.iter().filter(|&&(f, _)| f == v).count()
    }

    pub fn deg(&self, v: usize) -> usize {
        self.deg_in(v) + self.deg_out(v)
    }

    /// Edges incident to `v` as `(edge index, endpoint)` pairs; a loop shows
    /// up twice.
    pub fn incident(&self, v: usize) -> Vec<(usize, EndpointSide)> {
        let mut out = Vec::new();
        for (e, &(f, t)) in self.endpoints.iter().enumerate() {
            if t == v {
                out.push((e, EndpointSide::X0));
            }
            if f == v {
                out.push((e, EndpointSide::X1));
            }
        }
        out
    }

    /// Undirected vertex adjacency lists.
    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(f, t) in &self.endpoints {
            adj[f].push(t);
            adj[t].push(f);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbours();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Incoming, outgoing and signed incidence matrices (`|V| x |E|`).
    ///
    /// Loops are rejected: the incoming and outgoing entries would cancel in
    /// `I` and the loop becomes undetectable.
    pub fn incidence(&self) -> Result<IncidenceMatrices, GraphError> {
        if let Some((e, _)) = self
            .endpoints
            .iter()
            .enumerate()
            .find(|(_, &(f, t))| f == t)
        {
            return Err(GraphError::LoopPresent(self.edges[e].id.0.clone()));
        }
        let (nv, ne) = (self.vertices.len(), self.edges.len());
        let mut iplus = DMatrix::zeros(nv, ne);
        let mut iminus = DMatrix::zeros(nv, ne);
        for (e, &(f, t)) in self.endpoints.iter().enumerate() {
            iplus[(t, e)] = 1.0;
            iminus[(f, e)] = 1.0;
        }
        let i = &iplus - &iminus;
        Ok(IncidenceMatrices { iplus, iminus, i })
    }

    /// Adjacency matrix: entry `(k, l)` counts the edges from `v_k` to `v_l`.
    /// Loops land on the diagonal.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let nv = self.vertices.len();
        let mut a = DMatrix::zeros(nv, nv);
        for &(f, t) in &self.endpoints {
            a[(f, t)] += 1.0;
        }
        a
    }

    /// Path distance, degree-weighted vertex distance and degree-weighted
    /// edge distance. Flagged vertices contribute an infinite degree to the
    /// weighted distances but are ordinary vertices for the path distance.
    pub fn distances(&self) -> Distances {
        let nv = self.vertices.len();
        let ne = self.edges.len();
        let adj = self.neighbours();

        let mut d = vec![vec![None; nv]; nv];
        for s in 0..nv {
            let mut queue = VecDeque::from([s]);
            d[s][s] = Some(0u64);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if d[s][w].is_none() {
                        d[s][w] = Some(d[s][v].unwrap() + 1);
                        queue.push_back(w);
                    }
                }
            }
        }

        // Dijkstra with vertex weights deg(v); flagged vertices are
        // impassable. The weight of both path endpoints is included.
        let degs: Vec<u64> = (0..nv).map(|v| self.deg(v) as u64).collect();
        let mut d_v = vec![vec![None; nv]; nv];
        for s in 0..nv {
            if self.is_flagged(s) {
                continue;
            }
            let mut dist: Vec<Option<u64>> = vec![None; nv];
            dist[s] = Some(degs[s]);
            let mut done = vec![false; nv];
            loop {
                let mut best: Option<(u64, usize)> = None;
                for v in 0..nv {
                    if !done[v] {
                        if let Some(dv) = dist[v] {
                            if best.map_or(true, |(b, _)| dv < b) {
                                best = Some((dv, v));
                            }
                        }
                    }
                }
                let Some((dv, v)) = best else { break };
                done[v] = true;
                for &w in &adj[v] {
                    if self.is_flagged(w) {
                        continue;
                    }
                    let cand = dv + degs[w];
                    if dist[w].map_or(true, |old| cand < old) {
                        dist[w] = Some(cand);
                    }
                }
            }
            d_v[s] = dist;
        }

        // Edge distance: minimum of d_v over incident endpoint pairs.
        let mut d_e = vec![vec![None; ne]; ne];
        for e in 0..ne {
            d_e[e][e] = Some(0);
            for f in 0..ne {
                if e == f {
                    continue;
                }
                let (ef, et) = self.endpoints[e];
                let (ff, ft) = self.endpoints[f];
                let mut best: Option<u64> = None;
                for u in [ef, et] {
                    for w in [ff, ft] {
                        if let Some(val) = d_v[u][w] {
                            if best.map_or(true, |b| val < b) {
                                best = Some(val);
                            }
                        }
                    }
                }
                d_e[e][f] = best;
            }
        }

        Distances { d, d_v, d_e }
    }

    /// Finite span of an edge: its edge component after deleting the flagged
    /// vertices, i.e. edges reachable from `e` through shared non-flagged
    /// vertices. The boundary consists of span vertices that also touch
    /// edges outside the span; they are necessarily flagged.
    pub fn finite_span(&self, e: &EdgeId) -> Result<Subgraph, GraphError> {
        let start = self
            .edge_position(e)
            .ok_or_else(|| GraphError::UnknownEdge(e.0.clone()))?;
        Ok(self.finite_span_of(start))
    }

    pub(crate) fn finite_span_of(&self, start: usize) -> Subgraph {
        let ne = self.edges.len();
        let mut in_span = vec![false; ne];
        in_span[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(e) = queue.pop_front() {
            let (f, t) = self.endpoints[e];
            for v in [f, t] {
                if self.is_flagged(v) {
                    continue;
                }
                for (e2, _) in self.incident(v) {
                    if !in_span[e2] {
                        in_span[e2] = true;
                        queue.push_back(e2);
                    }
                }
            }
        }
        let edges: Vec<usize> = (0..ne).filter(|&e| in_span[e]).collect();
        let mut vset = HashSet::new();
        for &e in &edges {
            let (f, t) = self.endpoints[e];
            vset.insert(f);
            vset.insert(t);
        }
        let mut vertices: Vec<usize> = vset.iter().copied().collect();
        vertices.sort_unstable();
        let boundary: Vec<usize> = vertices
            .iter()
            .copied()
            .filter(|&v| self.incident(v).iter().any(|&(e2, _)| !in_span[e2]))
            .collect();
        Subgraph {
            vertices,
            edges,
            boundary,
        }
    }

    /// Evaluates all graph-class predicates. Requires `deg(v) >= 1`
    /// everywhere.
    pub fn classify(&self) -> Result<Classification, GraphError> {
        for v in 0..self.vertices.len() {
            if self.deg(v) == 0 {
                return Err(GraphError::IsolatedVertex(self.vertices[v].id.0.clone()));
            }
        }
        let nv = self.vertices.len();
        let deg_in: Vec<usize> = (0..nv).map(|v| self.deg_in(v)).collect();
        let deg_out: Vec<usize> = (0..nv).map(|v| self.deg_out(v)).collect();
        let deg: Vec<usize> = (0..nv).map(|v| deg_in[v] + deg_out[v]).collect();

        let completely_unconnected = deg.iter().all(|&d| d == 1);
        // Star naming follows the coordinate convention: the centre of an
        // outbound star carries x = 0 on every edge, so all arrows end there.
        let outbound_center = (0..nv).find(|&c| self.endpoints.iter().all(|&(_, t)| t == c));
        let inbound_center = (0..nv).find(|&c| self.endpoints.iter().all(|&(f, _)| f == c));
        let star = if let Some(c) = outbound_center {
            StarKind::Outbound(self.vertices[c].id.clone())
        } else if let Some(c) = inbound_center {
            StarKind::Inbound(self.vertices[c].id.clone())
        } else {
            StarKind::None
        };
        let mut pairs = HashSet::new();
        let simple = self.endpoints.iter().all(|&p| pairs.insert(p));
        let bipartite = (0..nv).all(|v| deg_in[v] == 0 || deg_out[v] == 0);
        let eulerian = (0..nv).all(|v| deg_in[v] == deg_out[v]);
        let uniformly_locally_finite = deg.iter().copied().max().unwrap_or(0);
        let layer = self.layer_structure(&deg_in, &deg_out);

        Ok(Classification {
            completely_unconnected,
            star,
            simple,
            bipartite,
            eulerian,
            layer,
            uniformly_locally_finite,
        })
    }

    /// Layer detection. Assigns integer potentials with
    /// `phi(from) = phi(to) + 1` along every edge; a consistent assignment
    /// yields a line-type layering, otherwise the gcd of the cycle
    /// imbalances yields a cyclic layering when it exceeds 1. Only connected
    /// graphs are layered; `None` means no nontrivial layer structure.
    fn layer_structure(&self, deg_in: &[usize], deg_out: &[usize]) -> Option<LayerStructure> {
        if !self.is_connected() {
            return None;
        }
        let nv = self.vertices.len();
        let mut phi = vec![0i64; nv];
        let mut seen = vec![false; nv];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut incident_edges = vec![Vec::new(); nv];
        for (e, &(f, t)) in self.endpoints.iter().enumerate() {
            incident_edges[f].push(e);
            incident_edges[t].push(e);
        }
        while let Some(v) = queue.pop_front() {
            for &e in &incident_edges[v] {
                let (f, t) = self.endpoints[e];
                let (w, target) = if f == v {
                    (t, phi[v] - 1)
                } else {
                    (f, phi[v] + 1)
                };
                if !seen[w] {
                    seen[w] = true;
                    phi[w] = target;
                    queue.push_back(w);
                }
            }
        }
        let mut g: i64 = 0;
        for &(f, t) in &self.endpoints {
            let imbalance = phi[f] - phi[t] - 1;
            g = gcd(g, imbalance.abs());
        }
        let (count, layer_of): (usize, Vec<usize>) = if g == 0 {
            let min = *phi.iter().min().unwrap();
            let max = *phi.iter().max().unwrap();
            let count = (max - min + 1) as usize;
            (count, phi.iter().map(|&p| (p - min) as usize).collect())
        } else if g >= 2 {
            let min = *phi.iter().min().unwrap();
            (
                g as usize,
                phi.iter().map(|&p| ((p - min) % g) as usize).collect(),
            )
        } else {
            return None;
        };
        if count < 2 {
            return None;
        }
        // Edge layer = layer of its x = 1 endpoint (`from`).
        let edge_layers: Vec<usize> = self.endpoints.iter().map(|&(f, _)| layer_of[f]).collect();
        let mut in_degrees = vec![None; count];
        let mut out_degrees = vec![None; count];
        let mut symmetric = true;
        for v in 0..nv {
            let p = layer_of[v];
            match in_degrees[p] {
                None => in_degrees[p] = Some(deg_in[v]),
                Some(d) if d != deg_in[v] => symmetric = false,
                _ => {}
            }
            match out_degrees[p] {
                None => out_degrees[p] = Some(deg_out[v]),
                Some(d) if d != deg_out[v] => symmetric = false,
                _ => {}
            }
        }
        // Canonical numbering: edges sorted by (layer, input order); the
        // thresholds delimit the per-layer blocks in that order.
        let mut edge_order: Vec<usize> = (0..self.edges.len()).collect();
        edge_order.sort_by_key(|&e| (edge_layers[e], e));
        let mut thresholds = vec![0usize];
        for p in 0..count {
            let block = edge_layers.iter().filter(|&&q| q == p).count();
            thresholds.push(thresholds.last().unwrap() + block);
        }
        Some(LayerStructure {
            count,
            vertex_layers: layer_of,
            edge_layers,
            in_degrees: in_degrees.into_iter().map(|d| d.unwrap_or(0)).collect(),
            out_degrees: out_degrees.into_iter().map(|d| d.unwrap_or(0)).collect(),
            symmetric,
            edge_order,
            thresholds,
        })
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Which endpoint of an edge a vertex sits at, per the coordinate
/// convention: `X0` is the `to` endpoint, `X1` the `from` endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndpointSide {
    X0,
    X1,
}

/// `|V| x |E|` incidence matrices: `iplus[(k, e)] = 1` iff edge `e` ends in
/// vertex `k`, `iminus[(k, e)] = 1` iff it starts there, `i = iplus - iminus`.
#[derive(Debug, Clone)]
pub struct IncidenceMatrices {
    pub iplus: DMatrix<f64>,
    pub iminus: DMatrix<f64>,
    pub i: DMatrix<f64>,
}

/// Subgraph as index sets into the parent graph, together with its boundary
/// (vertices shared with the complement-induced subgraph).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StarKind {
    None,
    /// All edges end at the centre (the centre carries x = 0).
    Outbound(VertexId),
    /// All edges start at the centre (the centre carries x = 1).
    Inbound(VertexId),
}

/// Layer structure of a connected graph: vertices partitioned so that every
/// edge runs from layer `p + 1` (its x = 1 end) to layer `p` (its x = 0
/// end), cyclically for cycle-type graphs.
#[derive(Debug, Clone, Serialize)]
pub struct LayerStructure {
    pub count: usize,
    pub vertex_layers: Vec<usize>,
    pub edge_layers: Vec<usize>,
    pub in_degrees: Vec<usize>,
    pub out_degrees: Vec<usize>,
    /// In- and out-degrees depend only on the layer.
    pub symmetric: bool,
    /// Edge indices sorted by (layer, input order).
    pub edge_order: Vec<usize>,
    /// Cumulative block boundaries: layer `p` edges occupy
    /// `edge_order[thresholds[p]..thresholds[p + 1]]`.
    pub thresholds: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub completely_unconnected: bool,
    pub star: StarKind,
    pub simple: bool,
    pub bipartite: bool,
    pub eulerian: bool,
    pub layer: Option<LayerStructure>,
    /// Maximum vertex degree; every finite graph is uniformly locally finite.
    pub uniformly_locally_finite: usize,
}

/// All-pairs distances; `None` encodes an infinite distance.
#[derive(Debug, Clone)]
pub struct Distances {
    /// Shortest path length between vertices.
    pub d: Vec<Vec<Option<u64>>>,
    /// Minimum over paths of the degree sum along the path, endpoints
    /// included; flagged vertices are impassable.
    pub d_v: Vec<Vec<Option<u64>>>,
    /// Edge analogue of `d_v`, zero on the diagonal.
    pub d_e: Vec<Vec<Option<u64>>>,
}

fn fixture(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Graph {
    let vertices = vertices
        .iter()
        .map(|id| Vertex {
            id: VertexId(id.to_string()),
            infinite: false,
        })
        .collect();
    let edges = edges
        .iter()
        .map(|&(id, from, to)| Edge {
            id: EdgeId(id.to_string()),
            from: VertexId(from.to_string()),
            to: VertexId(to.to_string()),
        })
        .collect();
    Graph::new(vertices, edges).expect("static fixture")
}

/// The Figure-style four-vertex example as drawn: degrees (3, 3, 2, 2).
pub fn figure1_graph() -> Graph {
    fixture(
        &["v1", "v2", "v3", "v4"],
        &[
            ("e1", "v2", "v1"),
            ("e2", "v1", "v2"),
            ("e3", "v1", "v3"),
            ("e4", "v3", "v4"),
            ("e5", "v2", "v4"),
        ],
    )
}

/// Variant of the four-vertex example whose endpoint map reproduces the
/// published adjacency matrix (which disagrees with the drawing in the
/// edges e4, e5).
pub fn figure1_printed_graph() -> Graph {
    fixture(
        &["v1", "v2", "v3", "v4"],
        &[
            ("e1", "v2", "v1"),
            ("e2", "v1", "v2"),
            ("e3", "v1", "v3"),
            ("e4", "v2", "v3"),
            ("e5", "v3", "v4"),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure1_degrees_follow_the_drawing() {
        let g = figure1_graph();
        let degs: Vec<usize> = (0..4).map(|v| g.deg(v)).collect();
        assert_eq!(degs, vec![3, 3, 2, 2]);
    }

    #[test]
    fn single_edge_degrees() {
        let g = Graph::from_edges(&[("e1", "v1", "v2")]).unwrap();
        assert_eq!(g.deg_in(g.vertex_position(&VertexId("v2".into())).unwrap()), 1);
        assert_eq!(g.deg_out(g.vertex_position(&VertexId("v1".into())).unwrap()), 1);
    }

    #[test]
    fn dangling_endpoint_is_rejected() {
        let err = Graph::new(
            vec![Vertex {
                id: VertexId("v1".into()),
                infinite: false,
            }],
            vec![Edge {
                id: EdgeId("e1".into()),
                from: VertexId("v1".into()),
                to: VertexId("vX".into()),
            }],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::DanglingEndpoint { .. }));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = Graph::from_edges(&[("e1", "a", "b"), ("e1", "b", "a")]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateId("e1".into()));
    }

    #[test]
    fn incidence_of_figure1_matches_the_endpoint_map() {
        let g = figure1_graph();
        let inc = g.incidence().unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            5,
            &[
                1.0, -1.0, -1.0, 0.0, 0.0, //
                -1.0, 1.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, 1.0, -1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, 1.0,
            ],
        );
        assert_eq!(inc.i, expected);
    }

    #[test]
    fn incidence_rejects_loops() {
        let g = Graph::from_edges(&[("e1", "v1", "v1"), ("e2", "v1", "v2")]).unwrap();
        assert_eq!(
            g.incidence().unwrap_err(),
            GraphError::LoopPresent("e1".into())
        );
    }

    #[test]
    fn single_edge_incidence() {
        let g = Graph::from_edges(&[("e1", "v1", "v2")]).unwrap();
        let inc = g.incidence().unwrap();
        assert_eq!(inc.iplus.as_slice(), &[0.0, 1.0]);
        assert_eq!(inc.iminus.as_slice(), &[1.0, 0.0]);
        assert_eq!(inc.i.as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn adjacency_of_the_printed_variant_matches_the_published_matrix() {
        let g = figure1_printed_graph();
        let a = g.adjacency();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 1.0, 0.0, //
                1.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        );
        assert_eq!(a, expected);
    }

    #[test]
    fn adjacency_counts_parallel_edges_and_loops() {
        let g = Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v1", "v2"), ("e3", "v1", "v1")])
            .unwrap();
        let a = g.adjacency();
        assert_eq!(a[(0, 1)], 2.0);
        assert_eq!(a[(0, 0)], 1.0);
    }

    #[test]
    fn directed_cycle_is_eulerian_not_bipartite() {
        let g =
            Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")])
                .unwrap();
        let c = g.classify().unwrap();
        assert!(c.eulerian);
        assert!(!c.bipartite);
        let layers = c.layer.expect("cycle is a layer graph");
        assert_eq!(layers.count, 3);
        assert!(layers.symmetric);
    }

    #[test]
    fn outbound_star_detection() {
        // All arrows end at the centre: the centre carries x = 0 on every edge.
        let g = Graph::from_edges(&[
            ("e1", "l1", "c"),
            ("e2", "l2", "c"),
            ("e3", "l3", "c"),
            ("e4", "l4", "c"),
            ("e5", "l5", "c"),
        ])
        .unwrap();
        let c = g.classify().unwrap();
        assert_eq!(c.star, StarKind::Outbound(VertexId("c".into())));
        assert!(c.bipartite);
    }

    #[test]
    fn stacked_stars_form_an_asymmetric_layer_graph() {
        let g = stacked_stars();
        let c = g.classify().unwrap();
        let layers = c.layer.expect("layer graph");
        assert_eq!(layers.count, 3);
        assert!(!layers.symmetric);
    }

    /// Two order-two stars sharing one external node, stacked in series.
    fn stacked_stars() -> Graph {
        Graph::from_edges(&[
            ("e1", "c1", "u"),
            ("e2", "c1", "v"),
            ("e3", "v", "c2"),
            ("e4", "z", "c2"),
        ])
        .unwrap()
    }

    #[test]
    fn isolated_vertex_blocks_classification() {
        let mut vertices = vec![
            Vertex {
                id: VertexId("v1".into()),
                infinite: false,
            },
            Vertex {
                id: VertexId("v2".into()),
                infinite: false,
            },
        ];
        vertices.push(Vertex {
            id: VertexId("lonely".into()),
            infinite: false,
        });
        let edges = vec![Edge {
            id: EdgeId("e1".into()),
            from: VertexId("v1".into()),
            to: VertexId("v2".into()),
        }];
        let g = Graph::new(vertices, edges).unwrap();
        assert_eq!(
            g.classify().unwrap_err(),
            GraphError::IsolatedVertex("lonely".into())
        );
    }

    #[test]
    fn path_distances() {
        let g = Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3")]).unwrap();
        let dist = g.distances();
        assert_eq!(dist.d[0][2], Some(2));
        // Unique path: deg(v1) + deg(v2) + deg(v3) = 1 + 2 + 1.
        assert_eq!(dist.d_v[0][2], Some(4));
    }

    #[test]
    fn flagged_vertex_cuts_weighted_distances() {
        let g = Graph::from_edges_flagged(&[("e1", "v1", "v2"), ("e2", "v2", "v3")], &["v2"])
            .unwrap();
        let dist = g.distances();
        assert_eq!(dist.d[0][2], Some(2));
        assert_eq!(dist.d_v[0][2], None);
        assert_eq!(dist.d_e[0][1], None);
    }

    #[test]
    fn finite_span_of_locally_finite_graph_is_everything() {
        let g =
            Graph::from_edges(&[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")])
                .unwrap();
        let span = g.finite_span(&EdgeId("e1".into())).unwrap();
        assert_eq!(span.edges, vec![0, 1, 2]);
        assert!(span.boundary.is_empty());
    }

    #[test]
    fn finite_span_stops_at_flagged_vertices() {
        // Two triangles joined at one flagged vertex.
        let g = Graph::from_edges_flagged(
            &[
                ("a1", "x", "y"),
                ("a2", "y", "w"),
                ("a3", "w", "x"),
                ("b1", "w", "p"),
                ("b2", "p", "q"),
                ("b3", "q", "w"),
            ],
            &["w"],
        )
        .unwrap();
        let span = g.finite_span(&EdgeId("a1".into())).unwrap();
        assert_eq!(span.edges, vec![0, 1, 2]);
        let w = g.vertex_position(&VertexId("w".into())).unwrap();
        assert_eq!(span.boundary, vec![w]);
    }

    #[test]
    fn finite_span_of_isolated_flagged_edge_is_itself() {
        let g = Graph::from_edges_flagged(&[("e1", "v1", "v2")], &["v1", "v2"]).unwrap();
        let span = g.finite_span(&EdgeId("e1".into())).unwrap();
        assert_eq!(span.edges, vec![0]);
        assert!(span.boundary.is_empty());
    }

    #[test]
    fn unknown_edge_is_reported() {
        let g = Graph::from_edges(&[("e1", "v1", "v2")]).unwrap();
        assert_eq!(
            g.finite_span(&EdgeId("zz".into())).unwrap_err(),
            GraphError::UnknownEdge("zz".into())
        );
    }
}
