use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code length {0}: must be a power of two in 8..={max}", max = crate::codebook::MAX_CODE_LENGTH)]
    InvalidCodeLength(usize),
    #[error("data value {value} out of range for a {symbols}-symbol codebook")]
    DataOutOfRange { value: u64, symbols: usize },
    #[error("word {0} is not a codeword")]
    NotACodeword(String),
    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid bit string: {0}")]
    InvalidBitString(String),
    #[error("flip probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("maximum weight {max_weight} exceeds word length {n}")]
    WeightOutOfRange { max_weight: usize, n: usize },
    #[error("exhaustive enumeration refused: {0}")]
    ExhaustiveRefused(String),
    #[error("transmitter: {0}")]
    Transmitter(&'static str),
    #[error("receiver: {0}")]
    Receiver(&'static str),
    #[error("frame: {0}")]
    Frame(String),
    #[error("config: {0}")]
    Config(String),
    #[error("report has no rows")]
    EmptyReport,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
