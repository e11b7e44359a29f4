use thiserror::Error;

use crate::exact::Exponent;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("the valuation of the zero element is undefined")]
    ZeroValue,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("all semigroup levels are empty; the cone is degenerate")]
    DegenerateCone,

    #[error("the cone has no ray at positive level; the level-1 slice is empty")]
    EmptySlice,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("exact hulls are supported up to dimension 3 (got {0})")]
    UnsupportedDimension(usize),

    #[error("khovanskii basis violation at level {level}: value {value} is not reachable")]
    KhovanskiiViolation { level: u32, value: Exponent },

    #[error("every coordinate vanishes at the given point (base locus)")]
    BaseLocus,

    #[error("evaluation hits a pole: {0}")]
    Pole(String),

    #[error("point lies outside the domain: {0}")]
    Domain(String),

    #[error("linearly dependent elements at degree {degree}")]
    DependentBasis { degree: u32 },
}

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line: 1,
            column,
            message: message.into(),
        }
    }

    /// Process exit status for the command-line surface: 2 for malformed
    /// input, 3 when a mathematical precondition fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::KhovanskiiViolation { .. }
            | Error::DegenerateCone
            | Error::EmptySlice
            | Error::Unbounded
            | Error::BaseLocus
            | Error::Pole(_)
            | Error::Domain(_)
            | Error::ZeroValue => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
