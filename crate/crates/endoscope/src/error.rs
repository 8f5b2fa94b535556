//! Error types shared across the crate.

use thiserror::Error;

use crate::local::ExtTag;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("residue characteristic must be an odd prime, got {0}")]
    InvalidPrime(u64),

    #[error("working precision must be at least 1")]
    InvalidPrecision,

    #[error("precision exhausted at N = {0}: value vanishes to working precision but is not an exact zero")]
    PrecisionExhausted(u32),

    #[error("element tags do not match: {0:?} vs {1:?}")]
    TagMismatch(ExtTag, ExtTag),

    #[error("{0:?}/{1:?} is not a quadratic subextension pair")]
    InvalidSubextension(ExtTag, ExtTag),

    #[error("element is not a unit at working precision")]
    NonUnit,

    #[error("infeasible valuation constraints: {0}")]
    Infeasible(String),

    #[error("degenerate request: {0}")]
    Degenerate(String),

    #[error("columns do not span a full-rank lattice at working precision")]
    RankDeficient,

    #[error("box unstable: {count_m} lattices at M = {box_m} but {count_m1} at M+1; rerun with a larger box")]
    BoxUnstable {
        box_m: i32,
        count_m: usize,
        count_m1: usize,
    },

    #[error("enumeration budget exceeded after {0} states (see ENDOSCOPE_MAX_STATES)")]
    BudgetExceeded(u64),

    #[error("parameters outside the configured feasibility grid: {0}")]
    GridExceeded(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("duplicate place {0}")]
    DuplicatePlace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code for reports and exit paths.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidPrime(_) => "INVALID_PRIME",
            Error::InvalidPrecision => "INVALID_PRECISION",
            Error::PrecisionExhausted(_) => "PRECISION_EXHAUSTED",
            Error::TagMismatch(_, _) => "TAG_MISMATCH",
            Error::InvalidSubextension(_, _) => "INVALID_SUBEXTENSION",
            Error::NonUnit => "NON_UNIT",
            Error::Infeasible(_) => "INFEASIBLE",
            Error::Degenerate(_) => "DEGENERATE",
            Error::RankDeficient => "RANK_DEFICIENT",
            Error::BoxUnstable { .. } => "BOX_UNSTABLE",
            Error::BudgetExceeded(_) => "BUDGET_EXCEEDED",
            Error::GridExceeded(_) => "GRID_EXCEEDED",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::DuplicatePlace(_) => "DUPLICATE_PLACE",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
