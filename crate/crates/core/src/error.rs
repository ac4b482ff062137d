use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid local dimensions: {0}")]
    InvalidDims(String),

    #[error("tolerance {0} outside (0, 1e-3)")]
    InvalidTolerance(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("zero vector has no phase")]
    ZeroVector,

    #[error("states {i} and {j} are not orthogonal (|<i|j>| = {overlap:e})")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },

    #[error("state set must hold between 1 and {max} states, got {got}")]
    InvalidCount { got: usize, max: usize },

    #[error("invalid bipartition mask {mask:#b} for {parties} parties")]
    InvalidCut { mask: u64, parties: usize },

    #[error("operation needs at least {needed} parties, space has {got}")]
    TooFewParties { needed: usize, got: usize },

    #[error("a bipartite cut must be given for a space with {0} parties")]
    CutRequired(usize),

    #[error("subspace is empty")]
    EmptySubspace,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("construction gate failed for {name}: {reason}")]
    GateFailed { name: String, reason: String },

    #[error("projection of state {0} vanishes")]
    VanishingProjection(usize),

    #[error("projected states {i} and {j} are not orthogonal (|<i|j>| = {overlap:e})")]
    ProjectionNotOrthogonal { i: usize, j: usize, overlap: f64 },

    #[error("need at least {needed} states, got {got}")]
    TooFewStates { needed: usize, got: usize },

    #[error("input basis is complete; there is no complement to search")]
    CompleteBasis,

    #[error("unknown catalog entry or generator: {0}")]
    UnknownName(String),

    #[error("malformed state file: {0}")]
    StateFile(String),
}
