use thiserror::Error;

use crate::subset::Subset;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ground set must contain at least one element")]
    EmptyGround,
    #[error("ground set of size {n} exceeds the maximum of {max}")]
    GroundTooLarge { n: usize, max: usize },
    #[error("edge {edge} contains element {element} outside the ground set 0..{n}")]
    EdgeOutOfRange { edge: Subset, element: usize, n: usize },
    #[error("hypergraph has no edges")]
    NoEdges,
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("exact enumeration over 2^{n} subsets exceeds the limit 2^{limit}")]
    TooLargeForExact { n: usize, limit: usize },
    #[error("cannot draw a {m}-subset from {n} elements")]
    BadCardinality { m: usize, n: usize },
    #[error("degenerate family: {0}")]
    DegenerateFamily(&'static str),
    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    BudgetExceeded { what: &'static str, needed: u128, limit: u128 },
    #[error("{0} is not an edge of the hypergraph")]
    NotAnEdge(Subset),
    #[error("schedule draws {needed} elements in total but the ground set has only {n}")]
    InsufficientGround { needed: usize, n: usize },
    #[error("edge-size bound ell = {0} is below 2")]
    BadEll(usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}
