use thiserror::Error;

use crate::Agent;

/// Errors raised by the clustering, auditing and fixture routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("agent {agent} is not a member of the coalition")]
    NotAMember { agent: Agent },
    #[error("agent {agent} is out of range for {n} agents")]
    AgentOutOfRange { agent: Agent, n: usize },
    #[error("empty agent set")]
    EmptySet,
    #[error("loss table has no entry for agent {agent} and coalition {coalition:?}")]
    ModelIncomplete { agent: Agent, coalition: Vec<Agent> },
    #[error("{what} needs a metric loss model (average or maximum)")]
    NeedsMetric { what: &'static str },
    #[error("{what} needs one-dimensional agent positions")]
    NeedsPositions { what: &'static str },
    #[error("{what} supports at most {cap} agents, got {n}")]
    SizeCap { what: &'static str, cap: usize, n: usize },
    #[error("dimension mismatch: row {row} has {found} features, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, found: usize },
    #[error("invalid distance {value} at ({i}, {j})")]
    InvalidDistance { i: usize, j: usize, value: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid clustering: {0}")]
    InvalidClustering(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instance has no colocation groups")]
    MissingGroups,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
