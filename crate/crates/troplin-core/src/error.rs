use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("graph must be connected and have at least one edge")]
    Disconnected,
    #[error("edge {0} has nonpositive length")]
    NonpositiveLength(usize),
    #[error("edge {0} references a vertex that does not exist")]
    BadEndpoint(usize),
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex name {0:?}")]
    UnknownVertex(String),
    #[error("offset {offset} lies outside edge {edge} (length {len})")]
    OffsetRange {
        edge: usize,
        offset: String,
        len: String,
    },
    #[error("edge id {0} out of range")]
    EdgeRange(usize),
    #[error("function does not match the graph")]
    GraphMismatch,
    #[error("edge {0}: breakpoints must start at offset 0, end at the edge length, and increase strictly")]
    BadTrack(usize),
    #[error("edge {0}: segment slope {1} is not an integer")]
    NonIntegerSlope(usize, String),
    #[error("function is discontinuous at vertex {0:?}")]
    Discontinuous(String),
    #[error("divisor must be effective away from the base point, found {0} at {1}")]
    NotEffectiveAway(i64, String),
    #[error("reduction exceeded its step budget; this is a bug")]
    ReductionStalled,
    #[error("subgraph is not an embedded circle")]
    NotACircle,
    #[error("no effective representative: the class has negative rank at the base point")]
    NoEffectiveRepresentative,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Wire(String),
}

pub type CoreResult<T> = Result<T, CoreError>;
