use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },

    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("{value} is not a residue of {field}")]
    InvalidResidue { value: u32, field: String },

    #[error("matrix dimensions {0}x{1} overflow the address space")]
    Overflow(usize, usize),

    #[error("empty operand")]
    EmptyInput,

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("polynomial {0} is reducible over the base field")]
    Reducible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed program: {0}")]
    MalformedProgram(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
