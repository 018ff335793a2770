use thiserror::Error;

/// Errors raised across model construction, training, inference and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown symbol {symbol:?} at position {position}")]
    UnknownSymbol { position: usize, symbol: char },

    #[error("empty sequence")]
    EmptySequence,

    #[error("sequence of length {len} exceeds chunk length {chunk_length}")]
    SequenceTooLong { len: usize, chunk_length: usize },

    #[error("sequence position {t} out of range 1..{len}")]
    SequencePositionOutOfRange { t: usize, len: usize },

    #[error("accumulator has no slot for state {state}")]
    AccumulatorStateMissing { state: usize },

    #[error("instance too large for the dense reference ({states} states x {len} symbols)")]
    InstanceTooLarge { states: usize, len: usize },

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("unknown sweep parameter {0:?}")]
    UnknownParameter(String),

    #[error("no path reaches an end state")]
    NoPath,

    #[error("mapping of read {read:?} falls outside the assembly (start {start}, assembly length {len})")]
    MappingOutOfBounds { read: String, start: usize, len: usize },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
