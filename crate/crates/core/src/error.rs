use std::fmt;

use thiserror::Error;

use crate::model::ValidationReport;
use crate::rational::Rational;

/// 1-based position in a source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("negative time value")]
    NegativeTime,
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
    #[error("time {time} is earlier than current time {current}")]
    TimeRegression { time: Rational, current: Rational },
    #[error("timestamp at index {index} is not monotone")]
    NonMonotoneTime { index: usize },
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),
    #[error("automaton is malformed: {0}")]
    Malformed(ValidationReport),
    #[error("automaton `{name}` is not integer-reset (offending edges: {edges:?})")]
    NotIrta { name: String, edges: Vec<usize> },
    #[error("automaton `{0}` is not deterministic")]
    NotDeterministic(String),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
