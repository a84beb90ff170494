use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parent array is empty")]
    EmptyTree,
    #[error("no root: every vertex has a parent")]
    NoRoot,
    #[error("multiple roots: vertices {first} and {second} have no parent")]
    MultipleRoots { first: usize, second: usize },
    #[error("vertex {vertex} has dangling parent index {parent} (n = {n})")]
    DanglingParent { vertex: usize, parent: usize, n: usize },
    #[error("cycle detected through vertex {vertex}")]
    Cycle { vertex: usize },
    #[error("invalid preorder degree sequence: {0}")]
    InvalidPreorder(String),
    #[error("vertex {vertex} out of range for tree of size {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("size guard exceeded: n = {n} > {limit}")]
    SizeGuard { n: usize, limit: usize },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("infeasible size n = {n}: {reason}")]
    Infeasible { n: usize, reason: String },
    #[error("rejection cap of {cap} attempts exceeded (n = {n}, last degree sum = {last_sum})")]
    RejectionCap { cap: usize, n: usize, last_sum: usize },
    #[error("attachment weight underflow at vertex {vertex}: rate {rate}")]
    WeightUnderflow { vertex: usize, rate: f64 },
    #[error("process went extinct {restarts} times before reaching {n} individuals")]
    Extinction { restarts: usize, n: usize },
    #[error("no Malthusian parameter: {0}")]
    NonMalthusian(String),
    #[error("dimension mismatch: expected r = {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
