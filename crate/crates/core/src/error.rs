use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("negative argument {0}")]
    NegativeArgument(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not bar-antisymmetric: {0}; no canonical basis exists for this data")]
    NotAntisymmetric(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("singular matrix")]
    Singular,
    #[error("invalid Cartan datum: {0}")]
    InvalidCartan(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("operation requires finite type")]
    NotFiniteType,
    #[error("module construction did not close within depth {0}")]
    DepthExceeded(usize),
    #[error("vector not in the span of the selected basis")]
    NotInSpan,
    #[error("span deficiency at weight {weight:?}: selected {selected} of {dim}; enlarge the enumeration window")]
    SpanDeficiency { weight: Vec<i64>, selected: usize, dim: usize },
    #[error("incompatible triple: {0}")]
    IncompatibleTriple(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("Gram-Schmidt sweep did not reach a fixpoint within {0} iterations")]
    NoFixpoint(usize),
    #[error("no canonical basis for this structure: {0}")]
    NoCanonicalBasis(String),
    #[error("canonical basis audit failed: {0}")]
    AuditFailed(String),
    #[error("non-integral value where an integral one was expected: {0}")]
    NotIntegral(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("relation check failed: {0}")]
    RelationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
