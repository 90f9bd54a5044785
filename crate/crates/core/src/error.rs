use thiserror::Error;

/// Errors reported by the constructors and operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The prefix sum at (1-based) position `index` exceeds `index`.
    #[error("not a Dyck vector: prefix sum exceeds the index at position {index}")]
    NotDyck { index: usize },

    #[error("malformed Dyck path: {0}")]
    MalformedPath(String),

    /// A composition part at (1-based) position `index` is zero.
    #[error("not a composition: part {index} is zero")]
    ZeroPart { index: usize },

    #[error("invalid set partition: {0}")]
    InvalidPartition(String),

    #[error("cannot shrink the empty partition")]
    ShrinkEmpty,

    /// Step `step` (1-based, `path[step-1] -> path[step]`) is not an edge of
    /// the composition graph, or the path does not start at `()`.
    #[error("not a valid path: bad step {step}")]
    InvalidPath { step: usize },

    #[error("invalid forest: {0}")]
    InvalidForest(String),

    #[error("cannot graft {label}: it is not smaller than node {node}")]
    GraftLabel { label: String, node: String },

    #[error("cannot prune a forest without integer labels")]
    PruneEmpty,

    #[error("map value {0} is not a node of the forest")]
    DecorateCodomain(String),

    #[error("division by zero in term s = {s}, factor j = {j}")]
    DivisionByZero { s: usize, j: usize },

    /// Two independent computations disagree.
    #[error("{check}: {detail}")]
    Mismatch { check: String, detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(check: &str, detail: impl Into<String>) -> Error {
    Error::Mismatch {
        check: check.to_string(),
        detail: detail.into(),
    }
}
