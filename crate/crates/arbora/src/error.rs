use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("edges do not form a tree: {0}")]
    NotATree(String),
    #[error("duplicate vertex id {0}")]
    DuplicateId(String),
    #[error("tree has no standard vertex")]
    Empty,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}-{1}")]
    UnknownEdge(String, String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("not a building block: {0}")]
    NotABuildingBlock(String),
    #[error("irrelevant block (empty or the whole vertex set)")]
    IrrelevantBlock,
    #[error("invalid tube: {0}")]
    InvalidTube(String),
    #[error("root {0} is a phantom vertex")]
    RootIsPhantom(String),
    #[error("invalid spine: {0}")]
    InvalidSpine(String),
    #[error("not a nested set: {0}")]
    NotNested(String),
    #[error("unknown arc {0}")]
    UnknownArc(String),
    #[error("node label is a singleton")]
    SingletonLabel,
    #[error("vertex {0} is not in the node label")]
    VertexNotInLabel(String),
    #[error("spine is not maximal")]
    NotMaximal,
    #[error("cut is not proper: {0}")]
    ImproperCut(String),
    #[error("no oriented spine path between {0} and {1}")]
    NoOrientedPath(String, String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("invalid ordered partition: {0}")]
    InvalidPartition(String),
    #[error("orders are not adjacent")]
    NotAdjacent,
    #[error("bound exceeded: {what} needs nu <= {limit}, got {nu}")]
    BoundExceeded {
        what: &'static str,
        limit: usize,
        nu: usize,
    },
    #[error("verification failure: {0}")]
    VerificationFailure(String),
    #[error("singleton recursion gives {recursive}, enumeration gives {direct}")]
    RecursionMismatch { recursive: u64, direct: u64 },
    #[error("not a negative path: {0}")]
    InvalidPath(String),
    #[error("closed-form coefficient disagrees with inversion at {subset}: {closed} vs {oracle}")]
    InversionMismatch {
        subset: String,
        closed: i64,
        oracle: i64,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn check_bound(what: &'static str, nu: usize, limit: usize) -> Result<()> {
    if nu > limit {
        Err(Error::BoundExceeded { what, limit, nu })
    } else {
        Ok(())
    }
}
