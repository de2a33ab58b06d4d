use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge `{0}` has a non-positive or non-finite weight")]
    NonPositiveWeight(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("duplicate edge id `{0}`")]
    DuplicateEdgeId(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertexId(String),
    #[error("scale factor must be positive and finite")]
    NonPositiveScale,
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("subdivision part count must be at least 1")]
    BadPartCount,
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParameters(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph has no cycle (Betti number 0)")]
    NoCycle,
    #[error("edge `{0}` lies on no cycle (bridge)")]
    NoCycleThroughEdge(String),
    #[error("oracle search budget exceeded")]
    OracleBudgetExceeded,
    #[error("matrix is not square")]
    NonSquare,
    #[error("matrix has a negative or non-finite entry")]
    NegativeEntry,
    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("universal-cover frontier exceeded {0} items")]
    FrontierBudgetExceeded(usize),
    #[error("instance exceeds the exact-volume size limits (b={betti}, hyperplanes={hyperplanes})")]
    SizeLimitExceeded { betti: usize, hyperplanes: usize },
    #[error("Betti number is zero")]
    ZeroBetti,
    #[error("Monte-Carlo bounding box is degenerate")]
    DegenerateBox,
    #[error("vector is not a cycle (boundary residual {0:e})")]
    NotACycle(f64),
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("transition matrix has no directed cycle")]
    EmptySubshift,
    #[error("Betti formula value {0} is not positive")]
    NonPositiveBetti(i64),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("argument outside the formula's domain: {0}")]
    OutOfDomain(String),
    #[error("cutting-plane budget of {0} cuts exceeded")]
    IterationBudgetExceeded(usize),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
