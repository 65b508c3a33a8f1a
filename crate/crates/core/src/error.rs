use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: index {index} outside 1..={n}")]
    IndexOutOfBounds { line: usize, index: u64, n: usize },

    #[error("line {line}: weight {weight} is not strictly positive")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("vertex set is empty")]
    EmptyVertexSet,

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: u64, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot place {m} edges on {n} vertices")]
    InfeasibleEdgeCount { n: usize, m: usize },

    #[error("brute force limited to {limit} vertices, graph has {n}")]
    TooLarge { n: usize, limit: usize },

    /// Raised before allocation when an estimate exceeds the configured budget.
    #[error("memory budget exceeded: needs ~{required} bytes, budget is {budget} bytes")]
    MemoryBudget { required: usize, budget: usize },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
