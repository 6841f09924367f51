use thiserror::Error;

use crate::criticality::PartialBracket;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown lattice `{0}`")]
    UnknownLattice(String),

    #[error("torus {dims:?} is not a multiple of the class period {period:?} for {lattice}")]
    IncommensurateDims {
        lattice: String,
        dims: [usize; 2],
        period: [usize; 2],
    },

    #[error("torus {dims:?} is too small for {lattice}: neighbor images coincide")]
    DegenerateDims { lattice: String, dims: [usize; 2] },

    #[error("pressure {0} outside [0, 1]")]
    PressureOutOfRange(f64),

    #[error("pressure {0} must lie strictly inside (0, 1)")]
    BoundaryPressure(f64),

    #[error("pressure shape does not match lattice {0}")]
    PressureShape(String),

    #[error("{0} has non-uniform vertex degree")]
    NonUniformDegree(String),

    #[error("{what} is not available for {lattice}")]
    Unsupported { lattice: String, what: String },

    #[error("{sites} sites exceeds the cap of {cap}")]
    TooLarge { sites: usize, cap: usize },

    #[error("search stopped after {0} nodes")]
    BudgetExhausted(u64),

    #[error("configuration is not legal")]
    Illegal,

    #[error("configuration is not a densest packing")]
    NotMaximal,

    #[error("hexagon {0} cannot be flipped")]
    NotFlippable(usize),

    #[error("growth fit needs at least {needed} sizes, got {got}")]
    InsufficientSizes { needed: usize, got: usize },

    #[error("critical bracket undecided: {0}")]
    Undecidable(PartialBracket),

    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
