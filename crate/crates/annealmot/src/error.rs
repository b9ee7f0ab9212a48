use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the graph, QUBO, solver, tracking, and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A node index referenced a position past the end of its side.
    #[error("node index {index} out of range for a side with {len} nodes")]
    NodeOutOfRange { index: usize, len: usize },

    /// The same `(left, right)` pair was supplied twice.
    #[error("duplicate edge ({left}, {right})")]
    DuplicateEdge { left: usize, right: usize },

    /// An operation referenced an edge the graph does not contain.
    #[error("edge ({left}, {right}) is not in the graph")]
    UnknownEdge { left: usize, right: usize },

    /// An edge weight fell outside the band its convention admits.
    #[error("weight {weight} outside [{lo}, {hi}] admitted by the weight convention")]
    WeightOutOfBand { weight: f64, lo: f64, hi: f64 },

    /// Two edges that were supposed to form a matching share a node.
    #[error("edges ({}, {}) and ({}, {}) share a node", a.0, a.1, b.0, b.1)]
    ConflictingEdges {
        a: (usize, usize),
        b: (usize, usize),
    },

    /// The exact solver refused a graph larger than its enumeration cap.
    #[error("graph has {edges} edges, above the exact-solver cap of {cap}")]
    EdgeCapExceeded { edges: usize, cap: usize },

    /// The constraint penalty must be strictly positive to forbid conflicts.
    #[error("constraint penalty must be positive, got {0}")]
    NonPositivePenalty(f64),

    /// A QUBO or graph with zero variables/edges where at least one is needed.
    #[error("problem has no variables")]
    EmptyProblem,

    /// A binary state whose length disagrees with the problem.
    #[error("state has {got} bits but the problem has {want} variables")]
    StateLength { got: usize, want: usize },

    /// Graphs that must agree structurally (node counts, edge sets) do not.
    #[error("graphs are not compatible: {0}")]
    GraphMismatch(String),

    /// A parameter value outside its documented domain.
    #[error("{0}")]
    InvalidParameter(String),

    /// Frames must be fed to the tracker in strictly increasing order.
    #[error("frame {got} does not advance past already-processed frame {last}")]
    FrameOrder { got: i64, last: i64 },

    /// Metrics over an empty ground truth are undefined.
    #[error("ground truth contains no boxes")]
    EmptyGroundTruth,

    /// A malformed line in a text input (graph, QUBO, CSV, config, image).
    #[error("{msg} at line {line}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach a file-path prefix to parse errors so CLI messages point at
    /// the offending input. Other variants pass through unchanged.
    pub fn in_file(self, path: &std::path::Path) -> Error {
        match self {
            Error::Parse { line, msg } => Error::Parse {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            other => other,
        }
    }

    /// True when the failure is a solver refusal (for example the exact
    /// solver's enumeration cap) rather than bad input data.
    pub fn is_solver_refusal(&self) -> bool {
        matches!(self, Error::EdgeCapExceeded { .. })
    }
}
