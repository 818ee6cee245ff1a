use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {element} is out of range for a ground set of {n} elements")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("ground set of {n} elements exceeds the cap of {cap} for {operation}")]
    GroundSetTooLarge {
        n: usize,
        cap: usize,
        operation: &'static str,
    },

    #[error("delete and contract sets overlap on {0}")]
    OverlappingMinor(String),

    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("probability {0} is outside the admissible range")]
    InvalidProbability(String),

    #[error("ground sets differ: {0} vs {1}")]
    MismatchedGroundSets(usize, usize),

    #[error("linear program dimension mismatch: {0}")]
    LpDimension(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("contention map has no entry for support set {0}")]
    MissingSupportSet(String),

    #[error("contention map is infeasible: {0}")]
    InfeasibleMap(String),

    #[error("mixture solver did not reach the target guarantee: {0}")]
    NonConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
