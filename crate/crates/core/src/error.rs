use thiserror::Error;

pub type Result<T, E = GdhError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GdhError {
    #[error("not a bijection: {0:?}")]
    NotBijective(Vec<usize>),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("arity {arity} exceeds the supported maximum {max}")]
    ArityTooLarge { arity: usize, max: usize },
    #[error("tuple {0:?} repeats a vertex")]
    RepeatedVertex(Vec<usize>),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graphs are over different theories")]
    TheoryMismatch,
    #[error("{fine} is not a subgroup of {coarse}")]
    NotASubgroup { fine: String, coarse: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("family member {0} has no edges")]
    EmptyMember(usize),
    #[error("projection would enumerate {count} graphs (limit {limit})")]
    ExplosionGuard { count: u128, limit: u128 },
    #[error("search at n = {n} exhausted its budget after {nodes} nodes")]
    BudgetExhausted { n: usize, nodes: u64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl GdhError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        GdhError::Parse {
            line,
            message: message.into(),
        }
    }
}
