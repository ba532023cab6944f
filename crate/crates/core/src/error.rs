use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a 16-QAM amplitude level (expected -3, -1, 1 or 3)")]
    InvalidLevel(i8),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("bit count {0} is not a multiple of 4")]
    BitLength(usize),
    #[error("bit value {0} is not 0 or 1")]
    NotABit(u8),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("unknown detector `{0}`")]
    UnknownDetector(String),
    #[error("impulse response has no taps or all taps are zero")]
    DegenerateFir,
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("invalid mobile channel configuration: {0}")]
    MobileConfig(String),
    #[error("index {index} plus delay {delay} runs past the end of a {len}-sample sequence")]
    BeyondEnd { index: usize, delay: usize, len: usize },
    #[error("channel memory {memory} exceeds the Viterbi state budget (max {max})")]
    StateBudget { memory: usize, max: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("target BER {0} is not bracketed by the curve")]
    NotBracketed(f64),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
