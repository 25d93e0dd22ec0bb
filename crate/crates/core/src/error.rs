use thiserror::Error;

use crate::geometry::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precision exhausted at {bits} bits{}", pair_suffix(.pair))]
    PrecisionExhausted { bits: u32, pair: Option<(usize, usize)> },

    #[error("circles do not intersect")]
    NoIntersection,

    #[error("circles are tangent")]
    Tangent { point: Box<Point> },

    #[error("segment endpoints coincide")]
    DegenerateSegment,

    #[error("{what} has {n} points, at most {max} supported")]
    SizeTooLarge { what: &'static str, n: usize, max: usize },

    #[error("tree has no edge crossing")]
    NotCrossing,

    #[error("configuration not handled: {0}")]
    NotApplicable(String),

    #[error("no admissible structure: {0}")]
    Infeasible(String),

    #[error("d-points stored with {have} bits, {need} requested")]
    PrecisionInsufficient { have: u32, need: u32 },

    #[error("sum {sum} exceeds the dynamic-programming bound {max}")]
    SumTooLarge { sum: u64, max: u64 },

    #[error("enumeration cap of {cap} structures reached")]
    EnumerationCapReached { cap: u64 },

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn pair_suffix(pair: &Option<(usize, usize)>) -> String {
    match pair {
        Some((u, v)) => format!(" on pair ({u}, {v})"),
        None => String::new(),
    }
}
