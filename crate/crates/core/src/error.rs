use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("table length: operation {op} has {got} entries, expected {expected}")]
    TableLength {
        op: String,
        got: usize,
        expected: usize,
    },
    #[error("entry out of range: operation {op} has entry {value} at position {pos} (size {size})")]
    EntryOutOfRange {
        op: String,
        pos: usize,
        value: usize,
        size: usize,
    },
    #[error("duplicate operation name {0}")]
    DuplicateName(String),
    #[error("unsupported arity {arity} for operation {op}")]
    Arity { op: String, arity: usize },
    #[error("empty universe")]
    EmptyUniverse,
    #[error("unknown operation {0}")]
    UnknownOperation(String),
    #[error("arity mismatch for {op}: expected {expected}, got {got}")]
    ArityMismatch {
        op: String,
        expected: usize,
        got: usize,
    },
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("empty seed set")]
    EmptySeeds,
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("io: {0}")]
    Io(String),
    #[error("schema: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
