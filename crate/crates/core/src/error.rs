use thiserror::Error;

use crate::rank::{EdgeKey, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("edge {0} is already present")]
    Duplicate(EdgeKey),
    #[error("edge {0} is not present")]
    NotFound(EdgeKey),
    #[error("self-loop at vertex {0}")]
    Loop(VertexId),
    #[error("vertex {vertex} would exceed the degree capacity {delta}")]
    Capacity { vertex: VertexId, delta: u32 },
    #[error("vertex {vertex} outside the universe of {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("edge {0} is already in the matched graph")]
    Duplicate(EdgeKey),
    #[error("edge {0} is not in the matched graph")]
    NotFound(EdgeKey),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinalMatchError {
    #[error("edge {edge} left matching {matching} which never contained it")]
    Underflow { edge: EdgeKey, matching: usize },
    #[error("edge {edge} joined matching {matching} twice")]
    Overflow { edge: EdgeKey, matching: usize },
    #[error("matching index {0} outside the union")]
    BadSource(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph with {n} vertices exceeds the oracle limit of {limit}")]
    Limit { n: usize, limit: usize },
    #[error("slice sizes sum to zero")]
    EmptyBase,
    #[error("no level satisfies the pivot condition")]
    NoPivot,
    #[error("pivot level {level} violates the {which} inequality")]
    PivotInequality { level: usize, which: &'static str },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    FinalMatch(#[from] FinalMatchError),
}
