//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while building or interrogating a graph.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("graph has no vertices or no edges")]
    EmptyGraph,
    #[error("edge `{0}` is a loop; use the adjacency representation")]
    LoopPresent(String),
    #[error("vertex `{0}` is isolated")]
    IsolatedVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("graph is disconnected")]
    GraphDisconnected,
    #[error("malformed graph file: {0}")]
    Parse(String),
}

/// Errors raised by the symmetry / admissibility machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("matrix is not an orthogonal projection (residual {residual:.3e})")]
    NotAProjection { residual: f64 },
    #[error("projection has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("graph is disconnected")]
    GraphDisconnected,
    #[error("subspace is not admissible for this graph")]
    InadmissibleSubspace,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors raised by the form-matrix criteria.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormsError {
    #[error("Gram matrix is singular or not positive definite")]
    SingularGram,
    #[error("index set of size {0} exceeds the power-set enumeration limit of 12")]
    IndexSetTooLarge(usize),
    #[error("diagonal block {0} is not coercive")]
    DiagonalNotCoercive(usize),
    #[error("H-Gram matrices must be diagonal for lattice criteria")]
    NonDiagonalGram,
    #[error("form matrices have mismatched shapes")]
    ShapeMismatch,
    #[error("empty sample list")]
    EmptySamples,
    #[error("lattice criteria need real entries (found imaginary part {0:.3e})")]
    ComplexEntries(f64),
    #[error("malformed form-matrix file: {0}")]
    Parse(String),
}

/// Errors raised by mesh assembly and interpolation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("coupling or node matrix has wrong shape (expected {expected}, got {got})")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("node matrix addresses flagged vertex `{0}`")]
    FlaggedVertexInM(String),
    #[error("edge data disagrees at vertex `{vertex}` ({left} vs {right})")]
    ContinuityViolation {
        vertex: String,
        left: f64,
        right: f64,
    },
    #[error("nonzero value {value} at flagged vertex `{vertex}`")]
    FlaggedNonzero { vertex: String, value: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors raised by the time integrators and probes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("step matrix is singular")]
    SingularStepMatrix,
    #[error("state norm exceeded 1e12 at t = {0}")]
    UnstableStep(f64),
    #[error("trajectories live on different meshes")]
    MeshMismatch,
    #[error("simulation budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
