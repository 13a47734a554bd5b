//! Directed metric graphs, the network sesquilinear form and its discretized
//! semigroups, plus the linear-algebra side: admissibility of symmetry
//! projections, graph-class characterizations, irreducibility, coercivity of
//! form matrices and qualitative semigroup probes.
//!
//! Every edge is a copy of `[0,1]` with the arrow's terminal endpoint at
//! `x = 0`. Vertices flagged `infinite` model infinite degree: they carry no
//! node value, which imposes Dirichlet conditions structurally. All types are
//! immutable after construction and all operations are pure functions of
//! their inputs.

pub mod assembly;
pub mod error;
pub mod forms;
pub mod graph;
pub mod incidence;
pub mod irreducibility;
pub(crate) mod linalg;
pub mod sim;
pub mod symmetry;
pub mod verify;
