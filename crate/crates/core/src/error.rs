use thiserror::Error;

pub type Result<T> = std::result::Result<T, HgwError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HgwError {
    #[error("line {line}: malformed input: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: negative edge weight {weight} between `{u}` and `{v}`")]
    NegativeWeight {
        line: usize,
        u: String,
        v: String,
        weight: f64,
    },

    #[error("line {line}: edge `{u}`-`{v}` repeated with weight {second} (previously {first})")]
    ConflictingDuplicateEdge {
        line: usize,
        u: String,
        v: String,
        first: f64,
        second: f64,
    },

    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose by {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("symmetric eigensolver did not converge")]
    ConvergenceFailure,

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("time must be positive, got {0}")]
    NonpositiveTime(f64),

    #[error("jump size must be positive, got {0}")]
    NonpositiveJump(f64),

    #[error("distance must be nonnegative, got {0}")]
    NegativeDistance(f64),

    #[error("scale must be positive, got {0}")]
    NonpositiveScale(f64),

    #[error("scales must be positive and strictly monotone")]
    InvalidScales,

    #[error("scale set is empty")]
    EmptyScaleSet,

    #[error("invalid spectrum range: lambda_1 = {lambda_1}, lambda_max = {lambda_max}, count = {count}")]
    InvalidSpectrumRange {
        lambda_1: f64,
        lambda_max: f64,
        count: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vertex index {index} out of range for {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("unknown vertex label `{0}`")]
    UnknownVertex(String),

    #[error("metric is not intrinsic: max vertex sum {max_vertex_sum}")]
    NonIntrinsicMetric { max_vertex_sum: f64 },

    #[error("linear system is singular (graph disconnected?)")]
    SingularSystem,

    #[error("quadrature did not converge for vertex {vertex} after {panels} panels")]
    QuadratureNonconvergence { vertex: usize, panels: usize },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
}
