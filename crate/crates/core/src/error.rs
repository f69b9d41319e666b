use crate::digraph::VertexId;
use thiserror::Error;

/// Errors raised while reading the edge-list format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected \"n m\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed arc line, expected \"u v\"")]
    MalformedArc { line: usize },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: duplicate arc ({tail}, {head})")]
    DuplicateArc { line: usize, tail: usize, head: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("expected {expected} arc lines, found {found}")]
    ArcCountMismatch { expected: usize, found: usize },
    #[error("missing header line")]
    MissingHeader,
}

/// Which hypothesis of the staged path procedure failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathHypothesis {
    /// `(v_i, v_j)` is an arc of the digraph with `i + 1 < j`.
    ForwardArc { tail: VertexId, head: VertexId },
    /// A path vertex has two or more children in the tree.
    BranchVertex(VertexId),
    /// A path vertex has no in-neighbour apart from its path neighbours.
    NoSpareInNeighbour(VertexId),
}

impl std::fmt::Display for PathHypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathHypothesis::ForwardArc { tail, head } => {
                write!(f, "forward arc ({tail}, {head}) between path vertices")
            }
            PathHypothesis::BranchVertex(v) => write!(f, "path vertex {v} is a branch vertex"),
            PathHypothesis::NoSpareInNeighbour(v) => {
                write!(f, "path vertex {v} has no in-neighbour off its path neighbours")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(VertexId, VertexId),
    #[error("({0}, {1}) is not an arc of the digraph")]
    NotAnArc(VertexId, VertexId),
    #[error("the digraph has no out-branching")]
    NoOutBranching,
    #[error("vertex {0} does not belong to the out-tree")]
    NotInTree(VertexId),
    #[error("({0}, {1}) is already a tree arc")]
    AlreadyTreeArc(VertexId, VertexId),
    #[error("1-change for ({0}, {1}) would create a cycle")]
    WouldCreateCycle(VertexId, VertexId),
    #[error("cannot re-parent the root {0}")]
    RootReparent(VertexId),
    #[error("root {0} does not reach every vertex")]
    RootCannotReachAll(VertexId),
    #[error("out-tree rooted at {0} cannot be extended to an out-branching")]
    NotExtendable(VertexId),
    #[error("path does not start at the root {0}")]
    QNotFromRoot(VertexId),
    #[error("vertex sequence is not a dipath: {0}")]
    NotADipath(String),
    #[error("invalid out-tree: {0}")]
    InvalidTree(String),
    #[error("out-branching is not 1-optimal: improving 1-change for ({0}, {1})")]
    NotOneOptimal(VertexId, VertexId),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("digraph contains the useless arc ({0}, {1})")]
    UselessArcsPresent(VertexId, VertexId),
    #[error("path hypothesis violated: {0}")]
    HypothesisViolated(PathHypothesis),
    #[error("degree hypothesis violated: {0}")]
    DegreeHypothesisViolated(String),
    #[error("instance too large for exhaustive search: n = {n} > {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("decomposition width {width} exceeds the supported maximum {limit}")]
    WidthTooLarge { width: usize, limit: usize },
    #[error("unsatisfiable generator spec: {0}")]
    UnsatisfiableSpec(String),
    #[error("parameter k must be at least 1")]
    InvalidK,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
