use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operands live in different variable spaces")]
    SpaceMismatch,
    #[error("operands use different Weyl signatures")]
    SignatureMismatch,
    #[error("operation requires canonical (q, p) coordinates")]
    CanonicalOnly,
    #[error("point has {got} coordinates, space needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("division by h left a remainder in {0}")]
    HbarRemainder(String),
    #[error("no quantization rule covers monomial {0}")]
    Coverage(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("h-dependent coefficient in classical Lie data: {0}")]
    HbarInLie(String),
    #[error("basis is linearly dependent")]
    DependentBasis,
    #[error("bracket {0} leaves the span of the basis")]
    NotClosed(String),
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("operator {0} is not nilpotent")]
    NonNilpotentOperator(usize),
    #[error("operators have no common annihilator")]
    NoCommonAnnihilator,
    #[error("inconsistent structure constants: {0}")]
    InconsistentStructure(String),
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("search bound {0} exhausted")]
    BoundExceeded(usize),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
